//! Attention dynamics: layer relaxation gated by pulse trains, and the
//! oscillator that produces those pulses.

mod layers;
mod metric;
mod oscillator;
mod rk4;
mod scenario;

pub use layers::{
    layer_rhs, LayerGains, LayerState, LayerSystem, Pulse, PulseSchedule, MIN_K2_T, RAMP_FRACTION,
};
pub use metric::{jacobian, max_eigenvalue_sym, metric_bound_margin, metric_matrix};
pub use oscillator::{
    count_upward_crossings, fn_rhs, simulate_oscillator, Current, OscillatorParams,
};
pub use rk4::{rk4_integrate, Trajectory};
pub use scenario::{LayerScenario, OscillatorScenario, Scenario};
