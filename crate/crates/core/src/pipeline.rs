//! End-to-end helpers: image → C1 (+ histogram) → features → model.

use crate::classify::{ModelConfig, NNModel, Prediction};
use crate::error::{Error, Result};
use crate::ingest::{rescale_min_side, Image};
use crate::patches::{
    extract_features_with, learn_patch_bank, Extractor, FeatureVector, PatchBank,
    DEFAULT_PATCH_COUNTS,
};
use crate::pooling::{c1_pool, C1Stack};
use crate::select::{apply_selection, select_features, SelectionReport, DEFAULT_SELECT_K};
use crate::wavelet::{approx_histogram, s1_transform};

/// What the model needs from one image.
#[derive(Debug, Clone, PartialEq)]
pub struct Encoded {
    pub c1: C1Stack,
    pub hist: Option<Vec<f64>>,
}

/// Rescales (if configured), runs S1 and C1, and computes the histogram
/// when the configuration asks for one.
pub fn encode(img: &Image, cfg: &ModelConfig) -> Result<Encoded> {
    let scaled;
    let img = match cfg.min_side {
        Some(side) => {
            scaled = rescale_min_side(img, side)?;
            &scaled
        }
        None => img,
    };
    let s1 = s1_transform(img, &cfg.wavelet)?;
    let hist = cfg
        .hist_bins
        .map(|b| approx_histogram(&s1, b))
        .transpose()?;
    Ok(Encoded {
        c1: c1_pool(&s1),
        hist,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOptions {
    pub config: ModelConfig,
    /// `(side, count)` pairs for the patch bank.
    pub patch_counts: Vec<(usize, usize)>,
    /// Patches kept after selection; `None` keeps the whole bank.
    pub select_k: Option<usize>,
    pub seed: u64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            config: ModelConfig::default(),
            patch_counts: DEFAULT_PATCH_COUNTS.to_vec(),
            select_k: Some(DEFAULT_SELECT_K),
            seed: 0,
        }
    }
}

/// Learns a bank from the encoded training images, extracts features,
/// selects salient patches and builds the classifier.
pub fn train_encoded(
    encoded: &[Encoded],
    labels: &[String],
    opts: &TrainOptions,
) -> Result<(NNModel, Option<SelectionReport>)> {
    if encoded.len() != labels.len() {
        return Err(Error::InvalidArgument(format!(
            "{} images for {} labels",
            encoded.len(),
            labels.len()
        )));
    }
    let c1s: Vec<C1Stack> = encoded.iter().map(|e| e.c1.clone()).collect();
    let bank = learn_patch_bank(&c1s, &opts.patch_counts, opts.seed)?;
    let extractor = Extractor::new(&bank, opts.config.boundary)?;
    let rows: Vec<Vec<f64>> = c1s
        .iter()
        .map(|c1| extractor.extract(c1).map(|f| f.values))
        .collect::<Result<_>>()?;
    drop(extractor);
    let hists = encoded.iter().map(|e| e.hist.clone()).collect();
    fit_model(bank, rows, hists, labels, opts)
}

/// Builds the classifier from C2 rows already extracted with the whole
/// `bank`: selects salient patches when asked, then keeps their columns.
/// `hists` holds one entry per row and must be filled in when the
/// configuration uses histograms.
pub fn fit_model(
    mut bank: PatchBank,
    rows: Vec<Vec<f64>>,
    hists: Vec<Option<Vec<f64>>>,
    labels: &[String],
    opts: &TrainOptions,
) -> Result<(NNModel, Option<SelectionReport>)> {
    if rows.len() != labels.len() || hists.len() != labels.len() {
        return Err(Error::InvalidArgument(format!(
            "{} feature rows and {} histograms for {} labels",
            rows.len(),
            hists.len(),
            labels.len()
        )));
    }
    let (rows, variances, report) = match opts.select_k {
        Some(k) if k < bank.len() => {
            let report = select_features(&rows, k)?;
            apply_selection(&mut bank, &report)?;
            let cols = bank.selected();
            let kept = rows
                .iter()
                .map(|r| cols.iter().map(|&c| r[c]).collect())
                .collect();
            (kept, report.variances.clone(), Some(report))
        }
        _ => (rows, Vec::new(), None),
    };
    let hists = match opts.config.hist_bins {
        Some(_) => Some(
            hists
                .into_iter()
                .map(|h| {
                    h.ok_or_else(|| {
                        Error::InvalidArgument("encoded image lacks a histogram".into())
                    })
                })
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };
    let model = NNModel::new(
        bank,
        variances,
        rows,
        hists,
        labels.to_vec(),
        opts.config.clone(),
    )?;
    Ok((model, report))
}

/// [`encode`] every image, then [`train_encoded`].
pub fn train(
    images: &[Image],
    labels: &[String],
    opts: &TrainOptions,
) -> Result<(NNModel, Option<SelectionReport>)> {
    let encoded: Vec<Encoded> = images
        .iter()
        .map(|img| encode(img, &opts.config))
        .collect::<Result<_>>()?;
    train_encoded(&encoded, labels, opts)
}

/// C2 features of an encoded image under the model's bank and boundary mode.
pub fn features(model: &NNModel, encoded: &Encoded) -> Result<FeatureVector> {
    extract_features_with(&encoded.c1, &model.bank, model.config.boundary)
}

pub fn classify_encoded(model: &NNModel, encoded: &Encoded) -> Result<Prediction> {
    let f = features(model, encoded)?;
    model.predict(&f, encoded.hist.as_deref())
}

pub fn classify_image(model: &NNModel, img: &Image) -> Result<Prediction> {
    classify_encoded(model, &encode(img, &model.config)?)
}

/// [`classify_encoded`] over many images, sharing one [`Extractor`].
pub fn classify_batch(model: &NNModel, encoded: &[Encoded]) -> Result<Vec<Prediction>> {
    let extractor = Extractor::new(&model.bank, model.config.boundary)?;
    encoded
        .iter()
        .map(|e| model.predict(&extractor.extract(&e.c1)?, e.hist.as_deref()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Split;
    use crate::synth::grating_corpus;

    #[test]
    fn small_end_to_end() {
        let corpus = grating_corpus(64, 3, 2, 11).unwrap();
        let (train_set, test): (Vec<_>, Vec<_>) =
            corpus.into_iter().partition(|s| s.split == Split::Train);
        let imgs: Vec<Image> = train_set.iter().map(|s| s.image.clone()).collect();
        let labels: Vec<String> = train_set.iter().map(|s| s.label.clone()).collect();
        let opts = TrainOptions {
            patch_counts: vec![(4, 20), (8, 20)],
            select_k: Some(10),
            ..TrainOptions::default()
        };
        let (model, report) = train(&imgs, &labels, &opts).unwrap();
        assert_eq!(model.feature_width(), 10);
        let enc: Vec<Encoded> = test
            .iter()
            .map(|s| encode(&s.image, &model.config).unwrap())
            .collect();
        let one_by_one: Vec<Prediction> = enc
            .iter()
            .map(|e| classify_encoded(&model, e).unwrap())
            .collect();
        assert_eq!(classify_batch(&model, &enc).unwrap(), one_by_one);
        assert_eq!(report.unwrap().variances.len(), 40);
        let correct = test
            .iter()
            .filter(|s| classify_image(&model, &s.image).unwrap().label == s.label)
            .count();
        assert!(correct >= 6, "{correct}/8");
    }

    #[test]
    fn histogram_rows_follow_config() {
        let corpus = grating_corpus(32, 1, 0, 2).unwrap();
        let imgs: Vec<Image> = corpus.iter().map(|s| s.image.clone()).collect();
        let labels: Vec<String> = corpus.iter().map(|s| s.label.clone()).collect();
        let mut opts = TrainOptions {
            patch_counts: vec![(4, 8)],
            select_k: None,
            ..TrainOptions::default()
        };
        opts.config.hist_bins = Some(16);
        let (model, report) = train(&imgs, &labels, &opts).unwrap();
        assert!(report.is_none());
        assert_eq!(model.train_hists.as_ref().unwrap()[0].len(), 16);
        let p = classify_image(&model, &imgs[2]).unwrap();
        assert_eq!(p.label, labels[2]);
        assert_eq!(p.distance, 0.0);
    }
}
