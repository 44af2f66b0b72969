//! Daubechies filter banks, periodized DWT steps and the frequency-ordered
//! wavelet packet tree.

mod bands;
mod dwt;
mod filters;
mod packet;

pub use bands::{band_nodes, node_frequency_range, nodes_within, Band, FrequencyRange};
pub use dwt::{analysis_step, synthesis_step};
pub use filters::{daubechies_filters, QuadFilterBank, MAX_ORDER};
pub use packet::{
    frequency_index, natural_position, wpt_decompose, wpt_reconstruct_nodes, WpNode, WpTree,
};
