//! Link scenario description.
//!
//! All fields are SI base units (Hz, m, s, W, bits) except the reference path
//! loss, which is a dB quantity by nature. The on-disk format is TOML; dotted
//! `key=value` overrides can be applied on top of any file.

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::SPEED_OF_LIGHT;

/// Which atom chain the transmission delay is maximised over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum D2Path {
    /// Corner-to-corner hop at every layer (a true upper bound).
    #[default]
    WorstCase,
    /// Vertically aligned hops, only the source-to-layer leg varies.
    Aligned,
}

/// Line-of-sight component of the Rician channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum LosMode {
    /// Rank-one all-ones matrix.
    #[default]
    AllOnes,
    /// Spherical-wave phases between the TX output layer and RX input layer.
    Spherical,
}

/// Order in which the block coordinate descent visits metasurface layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum LayerOrder {
    #[default]
    TxThenRx,
    RxThenTx,
}

/// How the BCD layer update picks among Gaussian-randomization candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateSelection {
    /// Largest relaxed objective `Σ_s ‖v^H Λ_s‖²`.
    #[default]
    Quadratic,
    /// Largest achievable rate after substituting the candidate into `H`.
    Rate,
}

/// Modelling switches and optimizer knobs that have no physical meaning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelOptions {
    pub d2_path: D2Path,
    pub los_mode: LosMode,
    pub layer_order: LayerOrder,
    /// Gaussian randomization draws per layer update.
    pub randomization_draws: usize,
    pub candidate_selection: CandidateSelection,
    /// Initial propagation delay budget, s.
    pub initial_td_s: f64,
    /// Phase grid size of the per-atom baseline.
    pub baseline_grid: usize,
}

impl Default for ModelOptions {
    fn default() -> Self {
        Self {
            d2_path: D2Path::WorstCase,
            los_mode: LosMode::AllOnes,
            layer_order: LayerOrder::TxThenRx,
            randomization_draws: 200,
            candidate_selection: CandidateSelection::Quadratic,
            initial_td_s: 0.6,
            baseline_grid: 16,
        }
    }
}

/// Every scalar parameter of one point-to-point SIM link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkScenario {
    pub num_streams: usize,
    pub layers_tx: usize,
    pub layers_rx: usize,
    pub atoms_tx: usize,
    pub atoms_rx: usize,
    pub frequency_hz: f64,
    pub wavelength_m: f64,
    pub bandwidth_hz: f64,
    pub noise_psd_w_per_hz: f64,
    pub tx_power_w: f64,
    pub rician_factor: f64,
    pub pathloss_exponent: f64,
    pub ref_distance_m: f64,
    /// Overrides the free-space reference loss `20 log10(4 pi d0 / lambda)` when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ref_pathloss_db: Option<f64>,
    pub link_distance_m: f64,
    pub thickness_tx_m: f64,
    pub thickness_rx_m: f64,
    pub atom_pitch_tx_m: f64,
    pub atom_pitch_rx_m: f64,
    pub atom_area_tx_m2: f64,
    pub atom_area_rx_m2: f64,
    pub wave_speed_tx_mps: f64,
    pub wave_speed_rx_mps: f64,
    pub packet_mean_bits: f64,
    pub arrival_rate_pps: f64,
    pub wait_budget_s: f64,
    pub delay_weight: f64,
    pub rng_seed: u64,
    #[serde(default)]
    pub options: ModelOptions,
}

/// One violated invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: &'static str,
    pub rule: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.rule)
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

fn is_perfect_square(n: usize) -> bool {
    let r = (n as f64).sqrt().round() as usize;
    r * r == n
}

/// Reference link parameters, with documented defaults for everything else.
pub fn default_scenario() -> LinkScenario {
    let wavelength = 0.0214;
    LinkScenario {
        num_streams: 3,
        layers_tx: 3,
        layers_rx: 3,
        atoms_tx: 36,
        atoms_rx: 36,
        frequency_hz: 7.0e9,
        wavelength_m: wavelength,
        bandwidth_hz: 10.0e6,
        noise_psd_w_per_hz: db_to_linear(-210.0),
        tx_power_w: 0.01,
        rician_factor: 20.0,
        pathloss_exponent: 2.2,
        ref_distance_m: 1.0,
        ref_pathloss_db: Some(80.0),
        link_distance_m: 100.0,
        thickness_tx_m: 0.1,
        thickness_rx_m: 0.1,
        atom_pitch_tx_m: wavelength / 2.0,
        atom_pitch_rx_m: wavelength / 2.0,
        atom_area_tx_m2: 0.01,
        atom_area_rx_m2: 0.01,
        wave_speed_tx_mps: SPEED_OF_LIGHT,
        wave_speed_rx_mps: SPEED_OF_LIGHT,
        packet_mean_bits: 100.0e6,
        arrival_rate_pps: 1.0,
        wait_budget_s: 0.5,
        delay_weight: 1.0,
        rng_seed: 1,
        options: ModelOptions::default(),
    }
}

impl Default for LinkScenario {
    fn default() -> Self {
        default_scenario()
    }
}

impl LinkScenario {
    /// Vertical spacing between TX layers, `D_t / L`.
    pub fn layer_gap_tx(&self) -> f64 {
        self.thickness_tx_m / self.layers_tx as f64
    }

    /// Vertical spacing between RX layers, `D_r / K`.
    pub fn layer_gap_rx(&self) -> f64 {
        self.thickness_rx_m / self.layers_rx as f64
    }

    pub fn atoms_per_row_tx(&self) -> usize {
        (self.atoms_tx as f64).sqrt().round() as usize
    }

    pub fn atoms_per_row_rx(&self) -> usize {
        (self.atoms_rx as f64).sqrt().round() as usize
    }

    /// Receive SNR scale `P / (S N0 B)` under uniform power allocation.
    pub fn snr_per_stream(&self) -> f64 {
        self.tx_power_w / (self.num_streams as f64 * self.noise_psd_w_per_hz * self.bandwidth_hz)
    }

    /// Offered load `delta_d * l_d`, bit/s.
    pub fn offered_load_bps(&self) -> f64 {
        self.arrival_rate_pps * self.packet_mean_bits
    }

    /// Checks the stability assumption for a given spectral efficiency.
    pub fn check_stability(&self, v_data: f64) -> Result<()> {
        let service = v_data * self.bandwidth_hz;
        let load = self.offered_load_bps();
        if service > load {
            Ok(())
        } else {
            Err(Error::Unstable {
                service_bps: service,
                load_bps: load,
            })
        }
    }

    /// Invariant violations; empty iff the scenario is valid.
    pub fn validate(&self) -> Vec<Violation> {
        validate(self)
    }

    /// Non-fatal observations, e.g. a wavelength inconsistent with the carrier.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let derived = SPEED_OF_LIGHT / self.frequency_hz;
        if self.frequency_hz > 0.0 && ((self.wavelength_m - derived) / derived).abs() > 1e-3 {
            out.push(format!(
                "wavelength {} m differs from c/f = {} m",
                self.wavelength_m, derived
            ));
        }
        out
    }

    pub fn validated(self) -> Result<Self> {
        let v = self.validate();
        if v.is_empty() {
            Ok(self)
        } else {
            let msg: Vec<String> = v.iter().map(|v| v.to_string()).collect();
            Err(Error::InvalidScenario(msg.join("; ")))
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Hex SHA-256 of the canonical TOML serialization.
    pub fn config_hash(&self) -> String {
        let text = self.to_toml().unwrap_or_default();
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Applies dotted-path overrides such as `num_streams=5` or
    /// `options.los_mode=spherical`.
    pub fn with_overrides<S: AsRef<str>>(&self, overrides: &[S]) -> Result<Self> {
        // toml::Value integers are i64, so the seed bypasses the table
        let mut seed = self.rng_seed;
        let base = Self { rng_seed: 0, ..self.clone() };
        let mut table: toml::Table = toml::from_str(&base.to_toml()?)
            .map_err(|e| Error::Config(e.to_string()))?;
        for item in overrides {
            let item = item.as_ref();
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override `{item}` is not key=value")))?;
            if key.trim() == "rng_seed" {
                seed = value
                    .trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("rng_seed `{}` is not a u64", value.trim())))?;
                continue;
            }
            set_path(&mut table, key.trim(), parse_value(value.trim()))?;
        }
        let text = toml::to_string(&table).map_err(|e| Error::Config(e.to_string()))?;
        Ok(Self { rng_seed: seed, ..Self::from_toml(&text)? })
    }
}

fn parse_value(raw: &str) -> toml::Value {
    if let Ok(i) = raw.parse::<i64>() {
        return toml::Value::Integer(i);
    }
    if let Ok(f) = raw.parse::<f64>() {
        return toml::Value::Float(f);
    }
    if let Ok(b) = raw.parse::<bool>() {
        return toml::Value::Boolean(b);
    }
    toml::Value::String(raw.trim_matches('"').to_string())
}

fn set_path(table: &mut toml::Table, path: &str, value: toml::Value) -> Result<()> {
    let mut parts: Vec<&str> = path.split('.').collect();
    let last = parts.pop().filter(|s| !s.is_empty()).ok_or_else(|| {
        Error::Config(format!("empty override key `{path}`"))
    })?;
    let mut cur = table;
    for p in parts {
        cur = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("`{p}` is not a table")))?;
    }
    // Integers given for float fields must stay floats, otherwise serde rejects them.
    let value = match (cur.get(last), value) {
        (Some(toml::Value::Float(_)), toml::Value::Integer(i)) => toml::Value::Float(i as f64),
        (_, v) => v,
    };
    let value = match (last, value) {
        ("ref_pathloss_db", toml::Value::Integer(i)) => toml::Value::Float(i as f64),
        (_, v) => v,
    };
    cur.insert(last.to_string(), value);
    Ok(())
}

pub fn validate(s: &LinkScenario) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |field: &'static str, rule: String| out.push(Violation { field, rule });

    let counts = [
        ("S", "num_streams", s.num_streams),
        ("L", "layers_tx", s.layers_tx),
        ("K", "layers_rx", s.layers_rx),
        ("M", "atoms_tx", s.atoms_tx),
        ("N", "atoms_rx", s.atoms_rx),
    ];
    for (sym, field, v) in counts {
        if v < 1 {
            push(field, format!("{sym} must be at least 1"));
        }
    }
    if s.atoms_tx < s.num_streams {
        push("atoms_tx", "M ≥ S violated".to_string());
    }
    if s.atoms_rx < s.num_streams {
        push("atoms_rx", "N ≥ S violated".to_string());
    }
    if s.atoms_tx >= 1 && !is_perfect_square(s.atoms_tx) {
        push("atoms_tx", "M must be a perfect square".to_string());
    }
    if s.atoms_rx >= 1 && !is_perfect_square(s.atoms_rx) {
        push("atoms_rx", "N must be a perfect square".to_string());
    }

    let positives = [
        ("f", "frequency_hz", s.frequency_hz),
        ("λ", "wavelength_m", s.wavelength_m),
        ("B", "bandwidth_hz", s.bandwidth_hz),
        ("N0", "noise_psd_w_per_hz", s.noise_psd_w_per_hz),
        ("P", "tx_power_w", s.tx_power_w),
        ("κ", "rician_factor", s.rician_factor),
        ("η", "pathloss_exponent", s.pathloss_exponent),
        ("d0", "ref_distance_m", s.ref_distance_m),
        ("d_eVTOL", "link_distance_m", s.link_distance_m),
        ("D_t", "thickness_tx_m", s.thickness_tx_m),
        ("D_r", "thickness_rx_m", s.thickness_rx_m),
        ("r_tx", "atom_pitch_tx_m", s.atom_pitch_tx_m),
        ("r_rx", "atom_pitch_rx_m", s.atom_pitch_rx_m),
        ("C_t", "atom_area_tx_m2", s.atom_area_tx_m2),
        ("C_r", "atom_area_rx_m2", s.atom_area_rx_m2),
        ("v_TX", "wave_speed_tx_mps", s.wave_speed_tx_mps),
        ("v_RX", "wave_speed_rx_mps", s.wave_speed_rx_mps),
        ("l_d", "packet_mean_bits", s.packet_mean_bits),
        ("δ_d", "arrival_rate_pps", s.arrival_rate_pps),
        ("t_b", "wait_budget_s", s.wait_budget_s),
        ("ρ", "delay_weight", s.delay_weight),
    ];
    for (sym, field, v) in positives {
        if !(v.is_finite() && v > 0.0) {
            push(field, format!("{sym} must be positive"));
        }
    }
    if let Some(pl0) = s.ref_pathloss_db {
        if !pl0.is_finite() {
            push("ref_pathloss_db", "PL0 must be finite".to_string());
        }
    }
    if s.options.randomization_draws < 1 {
        push("options.randomization_draws", "randomization draws must be at least 1".to_string());
    }
    if s.options.baseline_grid < 2 {
        push("options.baseline_grid", "baseline grid must have at least 2 points".to_string());
    }
    if !(s.options.initial_td_s.is_finite() && s.options.initial_td_s >= 0.0) {
        push("options.initial_td_s", "initial t_d must be non-negative".to_string());
    }
    out
}
