//! Sweep grids that reproduce the reference figures as data.

use std::fmt;
use std::str::FromStr;

/// Block lengths used by the rate and excess-power figures.
pub const DEFAULT_N: [u64; 10] = [10, 20, 50, 100, 200, 500, 1_000, 10_000, 100_000, 1_000_000];
pub const DEFAULT_PE: f64 = 1e-5;
pub const DEFAULT_RATE: f64 = 0.5;
/// `(start, stop, step)` in dB.
pub const DEFAULT_SNR_DB: (f64, f64, f64) = (-2.0, 20.0, 0.25);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sweep {
    RateVsSnr,
    RateVsEbn0,
    PerVsSnr,
    ExcessPower,
    HighSnrAsymptote,
}

impl Sweep {
    pub fn name(self) -> &'static str {
        match self {
            Sweep::RateVsSnr => "rate-vs-snr",
            Sweep::RateVsEbn0 => "rate-vs-ebn0",
            Sweep::PerVsSnr => "per-vs-snr",
            Sweep::ExcessPower => "excess-power",
            Sweep::HighSnrAsymptote => "high-snr-asymptote",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub sweep: Sweep,
    pub n_list: &'static [u64],
    pub snr_db: (f64, f64, f64),
    pub pe: f64,
    pub rate: f64,
    pub methods: &'static [&'static str],
}

pub const FIG_FB2: Preset = Preset {
    name: "fig-fb2",
    sweep: Sweep::RateVsSnr,
    n_list: &DEFAULT_N,
    snr_db: DEFAULT_SNR_DB,
    pe: DEFAULT_PE,
    rate: DEFAULT_RATE,
    methods: &["auto", "normal-approx"],
};

pub const FIG_FB6: Preset = Preset {
    name: "fig-fb6",
    sweep: Sweep::RateVsEbn0,
    n_list: &[100, 1_000, 10_000, 100_000, 1_000_000],
    snr_db: (-1.5, 12.0, 0.25),
    pe: DEFAULT_PE,
    rate: DEFAULT_RATE,
    methods: &["auto"],
};

pub const FIG_FB4: Preset = Preset {
    name: "fig-fb4",
    sweep: Sweep::ExcessPower,
    n_list: &DEFAULT_N,
    snr_db: DEFAULT_SNR_DB,
    pe: DEFAULT_PE,
    rate: DEFAULT_RATE,
    methods: &["auto"],
};

pub const FIG_FB8: Preset = Preset {
    name: "fig-fb8",
    sweep: Sweep::PerVsSnr,
    n_list: &[1, 10, 100, 1_000],
    snr_db: (-2.0, 12.0, 0.25),
    pe: DEFAULT_PE,
    rate: DEFAULT_RATE,
    methods: &["auto", "closed1", "closed2", "normal-approx"],
};

pub const PRESETS: [Preset; 4] = [FIG_FB2, FIG_FB6, FIG_FB4, FIG_FB8];

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PRESETS
            .iter()
            .find(|p| p.name == s)
            .copied()
            .ok_or_else(|| format!("unknown preset {s:?}"))
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name)
    }
}

/// Inclusive arithmetic grid; the stop value is kept when it lies within
/// rounding of a step multiple.
pub fn db_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    if !(step > 0.0) || !(stop >= start) {
        return Vec::new();
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=count).map(|i| start + step * i as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let g = db_grid(-2.0, 20.0, 0.25);
        assert_eq!(g.len(), 89);
        assert_eq!(*g.last().unwrap(), 20.0);
        assert!(db_grid(1.0, 0.0, 0.1).is_empty());
        assert!(db_grid(0.0, 1.0, 0.0).is_empty());
    }

    #[test]
    fn presets_parse() {
        for p in PRESETS {
            assert_eq!(p.name.parse::<Preset>().unwrap(), p);
        }
        assert!("fig-x".parse::<Preset>().is_err());
    }
}
