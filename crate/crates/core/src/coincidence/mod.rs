//! Photon routing through the linear-optics network, the preparation schedule of the
//! noisy source, and finite-shot sampling of Pauli measurements.

mod network;
mod sampling;
mod schedule;

pub use network::{
    branch_pair, class_label, enumerate_same_order_events, is_eightfold_coincidence, route_photons,
    same_order_classes, ClassSummary, DetectionPattern, EmissionEvent, EmissionOrder, EnumerationReport,
    EventRecord, HwpSettings, Mode, Photon, Polarization, TERMINALS,
};
pub use sampling::{born_probabilities, estimate_fidelity, sample_counts, FidelityEstimate, Histogram, Pauli, PauliSetting};
pub use schedule::{generation_probability, p_prime, preparation_schedule, PreparationRow, PreparationSchedule};
