//! Device-activity accounting attached to timeline events.

use serde::{Deserialize, Serialize};

/// Active device time (device-count x ns) and memory traffic accumulated by
/// an event or a whole run. Energy composition multiplies each field by the
/// matching device power.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct DeviceTallies {
    pub dac_ns: f64,
    pub adc_ns: f64,
    pub eo_tuning_ns: f64,
    pub vcsel_ns: f64,
    pub pd_ns: f64,
    pub soa_ns: f64,
    pub dram_accesses: u64,
    pub dram_bytes: u64,
    pub buffer_accesses: u64,
    pub buffer_bytes: u64,
}

impl DeviceTallies {
    pub fn add(&mut self, other: &DeviceTallies) {
        self.dac_ns += other.dac_ns;
        self.adc_ns += other.adc_ns;
        self.eo_tuning_ns += other.eo_tuning_ns;
        self.vcsel_ns += other.vcsel_ns;
        self.pd_ns += other.pd_ns;
        self.soa_ns += other.soa_ns;
        self.dram_accesses += other.dram_accesses;
        self.dram_bytes += other.dram_bytes;
        self.buffer_accesses += other.buffer_accesses;
        self.buffer_bytes += other.buffer_bytes;
    }
}
