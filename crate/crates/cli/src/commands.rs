//! One function per subcommand.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use wvc_core::classify::{load_model, save_model, Evaluation, ModelConfig, NNModel, Prediction};
use wvc_core::dynamics::Scenario;
use wvc_core::feedback::feedback_classify;
use wvc_core::ingest::{
    decode_grayscale, gaussian_downsample, wav_to_log_spectrogram, write_pgm, DatasetManifest,
    ManifestEntry, SpectrogramParams, Split,
};
use wvc_core::patches::{learn_patch_bank, Extractor};
use wvc_core::pipeline::{encode, fit_model, Encoded};
use wvc_core::pooling::C1Stack;
use wvc_core::select::SelectionReport;
use wvc_core::synth::grating_corpus;

use crate::config::Overrides;
use crate::error::{CliError, Result};
use crate::Command;

pub fn dispatch(command: Command, overrides: &Overrides) -> Result<()> {
    match command {
        Command::Train {
            manifest,
            output,
            report,
        } => train(&manifest, &output, report.as_deref(), overrides),
        Command::Predict {
            model,
            images,
            output,
        } => predict(&model, &images, output.as_deref(), overrides),
        Command::Evaluate { model, manifest } => evaluate(&model, &manifest, overrides),
        Command::Feedback {
            model,
            image,
            output,
        } => feedback(&model, &image, output.as_deref(), overrides),
        Command::Spectrogram {
            wav,
            out_dir,
            frame,
            hop,
            segment,
        } => spectrogram(
            &wav,
            &out_dir,
            &SpectrogramParams {
                frame,
                hop,
                segment_seconds: segment,
            },
        ),
        Command::SimulateRes {
            image,
            factor,
            output,
        } => simulate_res(&image, factor, &output),
        Command::Dynamics { scenario, output } => dynamics(&scenario, output.as_deref()),
        Command::Inspect {
            model,
            selection_csv,
        } => inspect(&model, selection_csv.as_deref()),
        Command::GenTextures {
            out_dir,
            side,
            train,
            test,
        } => gen_textures(&out_dir, side, train, test, overrides),
    }
}

/// Standard output, or a freshly created file.
fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::io(p, e))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_all(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| CliError::io(path.unwrap_or(Path::new("<stdout>")), e))
}

fn load(path: &Path) -> Result<NNModel> {
    load_model(path).map_err(CliError::input(path))
}

/// Decodes and encodes every image on the worker pool, keeping input order.
fn load_encoded(paths: &[PathBuf], cfg: &ModelConfig) -> Result<Vec<Encoded>> {
    paths
        .par_iter()
        .map(|p| {
            decode_grayscale(p)
                .and_then(|img| encode(&img, cfg))
                .map_err(CliError::input(p))
        })
        .collect()
}

fn predict_all(model: &NNModel, paths: &[PathBuf], encoded: &[Encoded]) -> Result<Vec<Prediction>> {
    let extractor = Extractor::new(&model.bank, model.config.boundary)?;
    encoded
        .par_iter()
        .zip(paths)
        .map(|(e, p)| {
            extractor
                .extract(&e.c1)
                .and_then(|f| model.predict(&f, e.hist.as_deref()))
                .map_err(CliError::input(p))
        })
        .collect()
}

fn train(
    manifest: &Path,
    output: &Path,
    report: Option<&Path>,
    overrides: &Overrides,
) -> Result<()> {
    let cfg = overrides.resolve()?;
    let opts = cfg.train_options();
    let manifest = DatasetManifest::load(manifest)?;
    let entries: Vec<&ManifestEntry> = manifest.split(Split::Train).collect();
    if entries.is_empty() {
        return Err(wvc_core::Error::Manifest("no train entries".into()).into());
    }
    let paths: Vec<PathBuf> = entries.iter().map(|e| e.path.clone()).collect();
    let labels: Vec<String> = entries.iter().map(|e| e.label.clone()).collect();

    let (c1s, hists): (Vec<C1Stack>, Vec<Option<Vec<f64>>>) = load_encoded(&paths, &opts.config)?
        .into_iter()
        .map(|e| (e.c1, e.hist))
        .unzip();
    let bank = learn_patch_bank(&c1s, &opts.patch_counts, opts.seed)?;
    let extractor = Extractor::new(&bank, opts.config.boundary)?;
    let rows: Vec<Vec<f64>> = c1s
        .par_iter()
        .map(|c1| extractor.extract(c1).map(|f| f.values))
        .collect::<wvc_core::Result<_>>()?;
    drop(extractor);
    let total = bank.len();
    let (model, selection) = fit_model(bank, rows, hists, &labels, &opts)?;
    save_model(&model, output)?;

    if let Some(path) = report {
        match &selection {
            Some(r) => std::fs::write(path, r.to_csv()).map_err(|e| CliError::io(path, e))?,
            None => eprintln!("wvc: no selection ran (k >= {total}), no report written"),
        }
    }
    println!(
        "trained on {} images, {} classes; kept {} of {} patches; wrote {}",
        labels.len(),
        model.classes().len(),
        model.bank.selected_count(),
        total,
        output.display()
    );
    Ok(())
}

fn predict(
    model: &Path,
    images: &[PathBuf],
    output: Option<&Path>,
    overrides: &Overrides,
) -> Result<()> {
    let mut model = load(model)?;
    overrides.apply_to(&mut model.config);
    let encoded = load_encoded(images, &model.config)?;
    let preds = predict_all(&model, images, &encoded)?;

    // writing into memory cannot fail
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["path", "predicted", "distance", "neighbor"])
        .expect("in-memory csv");
    for (p, pred) in images.iter().zip(&preds) {
        w.write_record([
            p.display().to_string(),
            pred.label.clone(),
            pred.distance.to_string(),
            pred.neighbor.to_string(),
        ])
        .expect("in-memory csv");
    }
    let bytes = w.into_inner().expect("in-memory csv");
    let text = String::from_utf8_lossy(&bytes);
    write_all(&mut *sink(output)?, output, &text)
}

/// Plain-text evaluation report.
fn report(eval: &Evaluation) -> String {
    let mut out = format!(
        "accuracy {} ({}/{})\n\nconfusion (rows: truth, columns: predicted)\ntruth",
        eval.accuracy(),
        eval.correct(),
        eval.total()
    );
    for l in &eval.labels {
        out.push_str(&format!(",{l}"));
    }
    out.push('\n');
    for (l, row) in eval.labels.iter().zip(&eval.counts) {
        out.push_str(l);
        for c in row {
            out.push_str(&format!(",{c}"));
        }
        out.push('\n');
    }
    out.push_str("\nroc (one class against the rest)\nlabel,x,y,p,r\n");
    for r in eval.roc() {
        out.push_str(&format!("{},{},{},{},{}\n", r.label, r.x, r.y, r.p, r.r));
    }
    out
}

fn evaluate(model: &Path, manifest: &Path, overrides: &Overrides) -> Result<()> {
    let mut model = load(model)?;
    overrides.apply_to(&mut model.config);
    let manifest = DatasetManifest::load(manifest)?;
    let entries: Vec<&ManifestEntry> = manifest.split(Split::Test).collect();
    if entries.is_empty() {
        return Err(wvc_core::Error::Manifest("no test entries".into()).into());
    }
    let paths: Vec<PathBuf> = entries.iter().map(|e| e.path.clone()).collect();
    let encoded = load_encoded(&paths, &model.config)?;
    let preds = predict_all(&model, &paths, &encoded)?;
    let eval = Evaluation::from_pairs(
        &model.classes(),
        entries
            .iter()
            .zip(&preds)
            .map(|(e, p)| (e.label.as_str(), p.label.as_str())),
    );
    print!("{}", report(&eval));
    Ok(())
}

#[derive(Serialize)]
struct ClusterLine<'a> {
    cluster: usize,
    label: &'a str,
    /// `low_confidence` for clusters below the model's minimum size.
    flag: &'static str,
    centroid_x: f64,
    centroid_y: f64,
    members: &'a [usize],
}

fn feedback(
    model: &Path,
    image: &Path,
    output: Option<&Path>,
    overrides: &Overrides,
) -> Result<()> {
    let cfg = overrides.resolve()?;
    let mut model = load(model)?;
    overrides.apply_to(&mut model.config);
    let encoded = load_encoded(&[image.to_path_buf()], &model.config)?;
    let feature = Extractor::new(&model.bank, model.config.boundary)?.extract(&encoded[0].c1)?;
    let clusters = feedback_classify(&model, &feature, cfg.feedback_k, cfg.seed)
        .map_err(CliError::input(image))?;
    let mut text = String::new();
    for c in &clusters {
        let line = ClusterLine {
            cluster: c.cluster,
            label: &c.label,
            flag: if c.low_confidence {
                "low_confidence"
            } else {
                "ok"
            },
            centroid_x: c.centroid[0],
            centroid_y: c.centroid[1],
            members: &c.members,
        };
        text.push_str(&serde_json::to_string(&line).expect("plain struct serializes"));
        text.push('\n');
    }
    write_all(&mut *sink(output)?, output, &text)
}

fn spectrogram(wav: &Path, out_dir: &Path, params: &SpectrogramParams) -> Result<()> {
    let images = wav_to_log_spectrogram(wav, params).map_err(|e| match e {
        wvc_core::Error::InvalidArgument(m) => CliError::Usage(m),
        e => CliError::input(wav)(e),
    })?;
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let stem = wav
        .file_stem()
        .map_or("segment".into(), |s| s.to_string_lossy());
    for (i, img) in images.iter().enumerate() {
        let path = out_dir.join(format!("{stem}_{i:03}.pgm"));
        write_pgm(img, &path)?;
        println!("{}", path.display());
    }
    if images.is_empty() {
        eprintln!(
            "wvc: no full {}-second segment in {}",
            params.segment_seconds,
            wav.display()
        );
    }
    Ok(())
}

fn simulate_res(image: &Path, factor: usize, output: &Path) -> Result<()> {
    if factor == 0 {
        return Err(CliError::Usage("--factor must be at least 1".into()));
    }
    let img = decode_grayscale(image)?;
    let out = gaussian_downsample(&img, factor).map_err(CliError::input(image))?;
    write_pgm(&out, output)?;
    Ok(())
}

fn dynamics(scenario: &Path, output: Option<&Path>) -> Result<()> {
    let text = std::fs::read_to_string(scenario).map_err(|e| CliError::io(scenario, e))?;
    let trajectory = Scenario::parse(&text)
        .and_then(|s| s.run())
        .map_err(CliError::input(scenario))?;
    write_all(&mut *sink(output)?, output, &trajectory.to_csv())
}

/// The selection a model was trained with, if any.
fn selection_of(model: &NNModel) -> Option<SelectionReport> {
    if model.variances.is_empty() {
        return None;
    }
    let mut kept = model.bank.selected();
    kept.sort_by(|&a, &b| {
        model.variances[b]
            .total_cmp(&model.variances[a])
            .then(a.cmp(&b))
    });
    Some(SelectionReport {
        variances: model.variances.clone(),
        k: kept.len(),
        kept,
    })
}

fn inspect(path: &Path, selection_csv: Option<&Path>) -> Result<()> {
    let model = load(path)?;
    let c = &model.config;
    let mut sides: Vec<(usize, usize, usize)> = Vec::new();
    for (i, p) in model.bank.patches.iter().enumerate() {
        let slot = match sides.iter().position(|s| s.0 == p.side) {
            Some(slot) => slot,
            None => {
                sides.push((p.side, 0, 0));
                sides.len() - 1
            }
        };
        sides[slot].1 += 1;
        if model.bank.selection[i] {
            sides[slot].2 += 1;
        }
    }
    sides.sort_unstable();
    let mut out = format!("model {}\n", path.display());
    out.push_str(&format!(
        "wavelet levels {}, epsilon {:e}, boundary {}\n",
        c.wavelet.levels,
        c.wavelet.epsilon,
        c.boundary.as_str()
    ));
    out.push_str(&match c.hist_bins {
        Some(b) => format!("histogram {b} bins, weight {}\n", c.hist_weight),
        None => "histogram off\n".into(),
    });
    out.push_str(&match c.min_side {
        Some(s) => format!("inputs rescaled to shorter side {s}\n"),
        None => "inputs used at native size\n".into(),
    });
    out.push_str(&format!(
        "bank seed {}, {} patches, {} selected\n",
        model.bank.rng_seed,
        model.bank.len(),
        model.bank.selected_count()
    ));
    for (side, n, kept) in &sides {
        out.push_str(&format!("  side {side:>2}: {n} drawn, {kept} kept\n"));
    }
    out.push_str(&format!("training rows {}\n", model.rows()));
    for class in model.classes() {
        let n = model.labels.iter().filter(|l| *l == class).count();
        out.push_str(&format!("  {class}: {n}\n"));
    }
    match (selection_of(&model), selection_csv) {
        (None, _) => out.push_str("no selection report (the whole bank is used)\n"),
        (Some(r), Some(p)) => {
            std::fs::write(p, r.to_csv()).map_err(|e| CliError::io(p, e))?;
            out.push_str(&format!("selection report written to {}\n", p.display()));
        }
        (Some(r), None) => {
            out.push_str("\nselection report\n");
            out.push_str(&r.to_csv());
        }
    }
    write_all(&mut *sink(None)?, None, &out)
}

fn gen_textures(
    out_dir: &Path,
    side: usize,
    train: usize,
    test: usize,
    overrides: &Overrides,
) -> Result<()> {
    let seed = overrides.seed.unwrap_or(0);
    let corpus = grating_corpus(side, train, test, seed).map_err(|e| match e {
        wvc_core::Error::InvalidArgument(m) => CliError::Usage(m),
        e => e.into(),
    })?;
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let mut entries = Vec::with_capacity(corpus.len());
    for (i, s) in corpus.iter().enumerate() {
        let name = format!("{}_{i:04}.pgm", s.label);
        write_pgm(&s.image, out_dir.join(&name))?;
        entries.push(ManifestEntry {
            path: name.into(),
            label: s.label.clone(),
            split: s.split,
        });
    }
    let manifest = DatasetManifest::new(entries)?;
    let path = out_dir.join("manifest.csv");
    std::fs::write(&path, manifest.to_csv()).map_err(|e| CliError::io(&path, e))?;
    println!("{}", path.display());
    Ok(())
}
