//! Atom grid indexing, intra-stack distances and the transmission delay `D2`.
//!
//! Each stack is a square grid of `per_row x per_row` atoms repeated on every
//! layer, layers separated by `gap = thickness / layers`. Data sources sit on a
//! line along the row axis, `lambda / 2` apart, centred on the grid, one gap
//! below the first layer.

use std::fmt::Write as _;

use crate::config::{D2Path, LinkScenario};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Tx,
    Rx,
}

impl Side {
    pub fn label(self) -> &'static str {
        match self {
            Side::Tx => "tx",
            Side::Rx => "rx",
        }
    }
}

/// 1-based flat index of an atom with its grid row (`m_z`) and column (`m_x`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AtomIndex {
    pub flat: usize,
    pub row: usize,
    pub col: usize,
    pub per_row: usize,
}

pub fn atom_index(m: usize, per_row: usize) -> Result<AtomIndex> {
    let max = per_row * per_row;
    if per_row == 0 || m == 0 || m > max {
        return Err(Error::IndexOutOfRange {
            what: "atom",
            index: m,
            max,
        });
    }
    Ok(AtomIndex {
        flat: m,
        row: m.div_ceil(per_row),
        col: (m - 1) % per_row + 1,
        per_row,
    })
}

/// Geometry of one stack (TX or RX) in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct StackGeometry {
    pub side: Side,
    pub streams: usize,
    pub layers: usize,
    pub atoms: usize,
    pub per_row: usize,
    pub pitch: f64,
    pub gap: f64,
    pub wavelength: f64,
    pub wave_speed: f64,
}

impl StackGeometry {
    pub fn new(s: &LinkScenario, side: Side) -> Self {
        match side {
            Side::Tx => Self {
                side,
                streams: s.num_streams,
                layers: s.layers_tx,
                atoms: s.atoms_tx,
                per_row: s.atoms_per_row_tx(),
                pitch: s.atom_pitch_tx_m,
                gap: s.layer_gap_tx(),
                wavelength: s.wavelength_m,
                wave_speed: s.wave_speed_tx_mps,
            },
            Side::Rx => Self {
                side,
                streams: s.num_streams,
                layers: s.layers_rx,
                atoms: s.atoms_rx,
                per_row: s.atoms_per_row_rx(),
                pitch: s.atom_pitch_rx_m,
                gap: s.layer_gap_rx(),
                wavelength: s.wavelength_m,
                wave_speed: s.wave_speed_rx_mps,
            },
        }
    }

    pub fn index(&self, m: usize) -> Result<AtomIndex> {
        atom_index(m, self.per_row)
    }

    fn centre(&self) -> f64 {
        (self.per_row as f64 + 1.0) / 2.0
    }

    /// In-plane offsets `(a, b)` from stream `s` to atom `idx`.
    pub fn source_offsets(&self, s: usize, idx: AtomIndex) -> Result<(f64, f64)> {
        if s == 0 || s > self.streams {
            return Err(Error::IndexOutOfRange {
                what: "stream",
                index: s,
                max: self.streams,
            });
        }
        let stream_offset = (s as f64 - (self.streams as f64 + 1.0) / 2.0) * self.wavelength / 2.0;
        let a = (idx.row as f64 - self.centre()) * self.pitch - stream_offset;
        let b = (idx.col as f64 - self.centre()) * self.pitch;
        Ok((a, b))
    }

    /// `d_{s,TX}` (or `d_{RX,s}`): stream `s` to an atom of the nearest layer.
    pub fn source_to_layer_distance(&self, s: usize, idx: AtomIndex) -> Result<f64> {
        let (a, b) = self.source_offsets(s, idx)?;
        Ok((a * a + b * b + self.gap * self.gap).sqrt())
    }

    /// Horizontal spacing `r_{m,m'}` between two atoms of the same layer.
    pub fn in_plane_spacing(&self, i: AtomIndex, j: AtomIndex) -> f64 {
        let dz = i.row as f64 - j.row as f64;
        let dx = i.col as f64 - j.col as f64;
        self.pitch * (dz * dz + dx * dx).sqrt()
    }

    /// Distance between atom `i` on one layer and atom `j` on the adjacent layer.
    pub fn interlayer_distance(&self, i: AtomIndex, j: AtomIndex) -> f64 {
        let r = self.in_plane_spacing(i, j);
        (r * r + self.gap * self.gap).sqrt()
    }

    /// Atom centre in the stack frame: (row axis, column axis, depth), depth 1
    /// being the layer closest to the sources.
    pub fn atom_position(&self, idx: AtomIndex, layer: usize) -> [f64; 3] {
        [
            (idx.row as f64 - self.centre()) * self.pitch,
            (idx.col as f64 - self.centre()) * self.pitch,
            layer as f64 * self.gap,
        ]
    }

    pub fn source_position(&self, s: usize) -> [f64; 3] {
        [
            (s as f64 - (self.streams as f64 + 1.0) / 2.0) * self.wavelength / 2.0,
            0.0,
            0.0,
        ]
    }

    pub fn indices(&self) -> impl Iterator<Item = AtomIndex> + '_ {
        (1..=self.atoms).map(move |m| AtomIndex {
            flat: m,
            row: m.div_ceil(self.per_row),
            col: (m - 1) % self.per_row + 1,
            per_row: self.per_row,
        })
    }

    /// Source-to-layer distances, `[s][m]`.
    pub fn source_distances(&self) -> Vec<Vec<f64>> {
        (1..=self.streams)
            .map(|s| {
                self.indices()
                    .map(|idx| self.source_to_layer_distance(s, idx).expect("valid stream"))
                    .collect()
            })
            .collect()
    }

    /// In-plane spacings, `[m][m']`.
    pub fn spacings(&self) -> Vec<Vec<f64>> {
        let idx: Vec<AtomIndex> = self.indices().collect();
        idx.iter()
            .map(|&i| idx.iter().map(|&j| self.in_plane_spacing(i, j)).collect())
            .collect()
    }

    /// Longest path through this stack, metres.
    pub fn path_length(&self, mode: D2Path) -> f64 {
        let source = self
            .source_distances()
            .into_iter()
            .flatten()
            .fold(0.0, f64::max);
        let hop = match mode {
            D2Path::Aligned => self.gap,
            D2Path::WorstCase => {
                // opposite corners of the grid
                let span = self.pitch * (self.per_row as f64 - 1.0) * 2f64.sqrt();
                (span * span + self.gap * self.gap).sqrt()
            }
        };
        source + (self.layers.saturating_sub(1)) as f64 * hop
    }

    pub fn traversal_time(&self, mode: D2Path) -> f64 {
        self.path_length(mode) / self.wave_speed
    }
}

/// Worst-case transmission delay `D2` through both stacks, seconds.
pub fn transmission_delay(s: &LinkScenario) -> f64 {
    let mode = s.options.d2_path;
    StackGeometry::new(s, Side::Tx).traversal_time(mode) + StackGeometry::new(s, Side::Rx).traversal_time(mode)
}

/// Every distance of both stacks plus `D2`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryReport {
    pub tx: StackGeometry,
    pub rx: StackGeometry,
    /// `d_{s,TX}`, indexed `[s][m]`.
    pub source_tx: Vec<Vec<f64>>,
    /// `d_{RX,s}`, indexed `[n][s]`.
    pub source_rx: Vec<Vec<f64>>,
    /// Inter-layer hop distances, identical for every layer pair, `[m'][m]`.
    pub hop_tx: Vec<Vec<f64>>,
    pub hop_rx: Vec<Vec<f64>>,
    pub spacing_tx: Vec<Vec<f64>>,
    pub spacing_rx: Vec<Vec<f64>>,
    pub gap_tx: f64,
    pub gap_rx: f64,
    pub d2: f64,
}

fn hops(g: &StackGeometry) -> Vec<Vec<f64>> {
    let idx: Vec<AtomIndex> = g.indices().collect();
    idx.iter()
        .map(|&i| idx.iter().map(|&j| g.interlayer_distance(i, j)).collect())
        .collect()
}

impl GeometryReport {
    pub fn build(s: &LinkScenario) -> Self {
        let tx = StackGeometry::new(s, Side::Tx);
        let rx = StackGeometry::new(s, Side::Rx);
        let src_rx = rx.source_distances();
        let source_rx = (0..rx.atoms)
            .map(|n| src_rx.iter().map(|row| row[n]).collect())
            .collect();
        Self {
            source_tx: tx.source_distances(),
            source_rx,
            hop_tx: hops(&tx),
            hop_rx: hops(&rx),
            spacing_tx: tx.spacings(),
            spacing_rx: rx.spacings(),
            gap_tx: tx.gap,
            gap_rx: rx.gap,
            d2: transmission_delay(s),
            tx,
            rx,
        }
    }

    /// Tab-separated dump, one row per (kind, i, j) pair.
    pub fn to_table(&self) -> String {
        let mut out = String::from("side\tkind\ti\tj\tdistance_m\n");
        for (side, src, hop, sp) in [
            ("tx", &self.source_tx, &self.hop_tx, &self.spacing_tx),
            ("rx", &self.source_rx, &self.hop_rx, &self.spacing_rx),
        ] {
            for (i, row) in src.iter().enumerate() {
                for (j, d) in row.iter().enumerate() {
                    let _ = writeln!(out, "{side}\tsource\t{}\t{}\t{d:e}", i + 1, j + 1);
                }
            }
            for (kind, m) in [("hop", hop), ("spacing", sp)] {
                for (i, row) in m.iter().enumerate() {
                    for (j, d) in row.iter().enumerate() {
                        let _ = writeln!(out, "{side}\t{kind}\t{}\t{}\t{d:e}", i + 1, j + 1);
                    }
                }
            }
        }
        let _ = writeln!(out, "both\td2_seconds\t0\t0\t{:e}", self.d2);
        out
    }
}
