//! Occupancy-level model of the crossed distillation network.
//!
//! Mode labels are those after the GHZ-forming beam splitters. Each source emits one
//! of two correlated branches:
//!
//! | source | H branch     | V branch     |
//! |--------|--------------|--------------|
//! | EPR1   | t1, a1       | t1, c1       |
//! | EPR2   | b1, c1       | b1, a1       |
//! | EPR3   | a2, c2       | a2, b2       |
//! | EPR4   | t2, b2       | t2, c2       |
//!
//! Distillation beam splitters send `a1` H/V to `a3`/`a4` and `a2` H/V to `a4`/`a3`,
//! `b1` H/V to `b4`/`b3` and `b2` H/V to `b3`/`b4`, `c1` H/V to `c3`/`c4` and `c2` H/V to
//! `c4`/`c3`. Heralds go straight to their detectors. Wave plate M2 flips the
//! polarization of modes `a1` and `b1`; M3 flips `b1`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    fn flipped(self) -> Self {
        match self {
            Polarization::H => Polarization::V,
            Polarization::V => Polarization::H,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    T1,
    A1,
    B1,
    C1,
    A2,
    B2,
    C2,
    T2,
}

impl Mode {
    pub fn label(self) -> &'static str {
        match self {
            Mode::T1 => "t1",
            Mode::A1 => "a1",
            Mode::B1 => "b1",
            Mode::C1 => "c1",
            Mode::A2 => "a2",
            Mode::B2 => "b2",
            Mode::C2 => "c2",
            Mode::T2 => "t2",
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Mode::T1, Mode::A1, Mode::B1, Mode::C1, Mode::A2, Mode::B2, Mode::C2, Mode::T2]
            .into_iter()
            .find(|m| m.label() == s)
            .ok_or_else(|| Error::UnknownMode(s.to_string()))
    }
}

/// Detection terminals in table order.
pub const TERMINALS: [&str; 8] = ["t1", "t2", "a3", "a4", "b3", "b4", "c3", "c4"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Photon {
    pub mode: Mode,
    pub polarization: Polarization,
}

impl fmt::Display for Photon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}_{}", self.polarization, self.mode.label())
    }
}

impl FromStr for Photon {
    type Err = Error;

    /// `H_a1`, `V_t2`, ...
    fn from_str(s: &str) -> Result<Self> {
        let (pol, mode) = s
            .split_once('_')
            .ok_or_else(|| Error::Parse(format!("photon `{s}` is not of the form H_a1")))?;
        let polarization = match pol {
            "H" => Polarization::H,
            "V" => Polarization::V,
            _ => return Err(Error::Parse(format!("polarization `{pol}` is not H or V"))),
        };
        Ok(Photon {
            mode: mode.parse()?,
            polarization,
        })
    }
}

/// The two photons of a pair emitted by `source` (0-based) in the given branch.
pub fn branch_pair(source: usize, branch: Polarization) -> [Photon; 2] {
    use Mode::*;
    let (m1, m2) = match (source, branch) {
        (0, Polarization::H) => (T1, A1),
        (0, Polarization::V) => (T1, C1),
        (1, Polarization::H) => (B1, C1),
        (1, Polarization::V) => (B1, A1),
        (2, Polarization::H) => (A2, C2),
        (2, Polarization::V) => (A2, B2),
        (3, Polarization::H) => (T2, B2),
        (3, Polarization::V) => (T2, C2),
        _ => panic!("source index {source} out of range"),
    };
    [m1, m2].map(|mode| Photon {
        mode,
        polarization: branch,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmissionOrder {
    /// One pair from every source.
    Ideal,
    /// Four pairs in total with at least one source emitting two.
    DoublePair,
}

/// Photon pairs emitted by the four sources in one trial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EmissionEvent {
    pairs: [Vec<[Photon; 2]>; 4],
}

impl EmissionEvent {
    /// Build from the branch of every emitted pair, per source.
    pub fn from_branches(branches: [&[Polarization]; 4]) -> Self {
        let pairs = std::array::from_fn(|s| branches[s].iter().map(|&b| branch_pair(s, b)).collect());
        Self { pairs }
    }

    pub fn empty() -> Self {
        Self::from_branches([&[], &[], &[], &[]])
    }

    pub fn pairs(&self) -> &[Vec<[Photon; 2]>; 4] {
        &self.pairs
    }

    /// Pairs emitted per source.
    pub fn occupancy(&self) -> [usize; 4] {
        std::array::from_fn(|s| self.pairs[s].len())
    }

    pub fn order(&self) -> EmissionOrder {
        if self.occupancy() == [1, 1, 1, 1] {
            EmissionOrder::Ideal
        } else {
            EmissionOrder::DoublePair
        }
    }

    pub fn photons(&self) -> impl Iterator<Item = Photon> + '_ {
        self.pairs.iter().flatten().flatten().copied()
    }

    /// Class label in `g1-g2^2-0-g4` notation.
    pub fn class_label(&self) -> String {
        class_label(self.occupancy())
    }

    /// Source column text, e.g. `H_b1 H_c1 H_b1 H_c1`, or `0` for no emission.
    pub fn source_text(&self, source: usize) -> String {
        if self.pairs[source].is_empty() {
            return "0".into();
        }
        self.pairs[source]
            .iter()
            .flatten()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for EmissionEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cols: Vec<String> = (0..4).map(|s| self.source_text(s)).collect();
        f.write_str(&cols.join(" | "))
    }
}

impl FromStr for EmissionEvent {
    type Err = Error;

    /// Four `|`-separated source columns of photons (`H_t1 H_a1 | ... `), `0` for none.
    /// Photons of a column are grouped into the source's branch pairs in any order.
    fn from_str(s: &str) -> Result<Self> {
        let cols: Vec<&str> = s.split('|').map(str::trim).collect();
        if cols.len() != 4 {
            return Err(Error::Parse(format!(
                "expected 4 source columns separated by `|`, found {}",
                cols.len()
            )));
        }
        let mut branches: [Vec<Polarization>; 4] = Default::default();
        for (source, col) in cols.iter().enumerate() {
            if *col == "0" || col.is_empty() {
                continue;
            }
            let mut photons: Vec<Photon> = col
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_>>()?;
            for branch in [Polarization::H, Polarization::V] {
                let [x, y] = branch_pair(source, branch);
                while let (Some(i), Some(j)) = (
                    photons.iter().position(|p| *p == x),
                    photons.iter().position(|p| *p == y),
                ) {
                    let (hi, lo) = if i > j { (i, j) } else { (j, i) };
                    photons.remove(hi);
                    photons.remove(lo);
                    branches[source].push(branch);
                }
            }
            if let Some(stray) = photons.first() {
                return Err(Error::Parse(format!(
                    "photon {stray} cannot be paired as an emission of EPR{}",
                    source + 1
                )));
            }
        }
        Ok(Self::from_branches([
            &branches[0],
            &branches[1],
            &branches[2],
            &branches[3],
        ]))
    }
}

/// `g1-g2^2-0-g4` style label of a source occupancy.
pub fn class_label(occupancy: [usize; 4]) -> String {
    occupancy
        .iter()
        .enumerate()
        .map(|(s, &n)| match n {
            0 => "0".to_string(),
            1 => format!("g{}", s + 1),
            n => format!("g{}^{}", s + 1, n),
        })
        .collect::<Vec<_>>()
        .join("-")
}

/// Positions of the optional wave plates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct HwpSettings {
    /// Flips `a1` and `b1`.
    pub m2: bool,
    /// Flips `b1`.
    pub m3: bool,
}

impl HwpSettings {
    pub const ALL: [HwpSettings; 4] = [
        HwpSettings { m2: false, m3: false },
        HwpSettings { m2: true, m3: false },
        HwpSettings { m2: false, m3: true },
        HwpSettings { m2: true, m3: true },
    ];

    fn flips(self, mode: Mode) -> bool {
        match mode {
            Mode::A1 => self.m2,
            Mode::B1 => self.m2 ^ self.m3,
            _ => false,
        }
    }
}

/// Photon counts per terminal in [`TERMINALS`] order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct DetectionPattern(pub [u32; 8]);

impl DetectionPattern {
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }
}

fn terminal(photon: Photon) -> usize {
    use Mode::*;
    use Polarization::*;
    match (photon.mode, photon.polarization) {
        (T1, _) => 0,
        (T2, _) => 1,
        (A1, H) | (A2, V) => 2,
        (A1, V) | (A2, H) => 3,
        (B1, V) | (B2, H) => 4,
        (B1, H) | (B2, V) => 5,
        (C1, H) | (C2, V) => 6,
        (C1, V) | (C2, H) => 7,
    }
}

/// Route every photon of `event` to its terminal.
pub fn route_photons(event: &EmissionEvent, hwp: HwpSettings) -> DetectionPattern {
    let mut counts = [0u32; 8];
    for mut photon in event.photons() {
        if hwp.flips(photon.mode) {
            photon.polarization = photon.polarization.flipped();
        }
        counts[terminal(photon)] += 1;
    }
    DetectionPattern(counts)
}

/// Exactly one photon at each of the eight terminals.
pub fn is_eightfold_coincidence(pattern: &DetectionPattern) -> bool {
    pattern.0.iter().all(|&c| c == 1)
}

#[derive(Debug, Clone, Serialize)]
pub struct EventRecord {
    pub class: String,
    pub order: EmissionOrder,
    pub event: String,
    pub hwp: HwpSettings,
    pub pattern: DetectionPattern,
    pub coincidence: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassSummary {
    pub class: String,
    pub occupancy: [usize; 4],
    pub hwp: HwpSettings,
    pub events: usize,
    pub passing: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnumerationReport {
    pub events: Vec<EventRecord>,
    pub classes: Vec<ClassSummary>,
}

impl EnumerationReport {
    /// Passing events that are not ideal emissions.
    pub fn false_accepts(&self) -> usize {
        self.events
            .iter()
            .filter(|e| e.coincidence && e.order != EmissionOrder::Ideal)
            .count()
    }

    pub fn to_csv(&self) -> Result<String> {
        crate::report::csv_table(
            &[
                "class", "EPR1", "EPR2", "EPR3", "EPR4", "M2", "M3", "t1", "t2", "a3", "a4", "b3", "b4", "c3",
                "c4", "coincidence",
            ],
            self.events.iter().map(|e| {
                let cols: Vec<&str> = e.event.split(" | ").collect();
                let on = |b: bool| if b { "in" } else { "out" }.to_string();
                let mut row = vec![e.class.clone()];
                row.extend(cols.iter().map(|c| c.to_string()));
                row.push(on(e.hwp.m2));
                row.push(on(e.hwp.m3));
                row.extend(e.pattern.0.iter().map(|c| c.to_string()));
                row.push(e.coincidence.to_string());
                row
            }),
        )
    }
}

/// Branch multisets for `n` pairs from one source: `[]`, `[H]`, `[V]`, `[H,H]`, `[H,V]`, `[V,V]`.
fn branch_choices(n: usize) -> Vec<Vec<Polarization>> {
    use Polarization::*;
    match n {
        0 => vec![vec![]],
        1 => vec![vec![H], vec![V]],
        2 => vec![vec![H, H], vec![H, V], vec![V, V]],
        _ => unreachable!("at most two pairs per source"),
    }
}

/// Source occupancies with four pairs in total and at most two per source.
pub fn same_order_classes() -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for n0 in 0..=2 {
        for n1 in 0..=2 {
            for n2 in 0..=2 {
                for n3 in 0..=2 {
                    if n0 + n1 + n2 + n3 == 4 {
                        out.push([n0, n1, n2, n3]);
                    }
                }
            }
        }
    }
    out
}

/// Every same-order emission (all classes, all branch assignments) under every wave-plate
/// configuration, routed and filtered.
pub fn enumerate_same_order_events() -> EnumerationReport {
    let mut events = Vec::new();
    let mut classes = Vec::new();
    for occupancy in same_order_classes() {
        let choices: Vec<Vec<Vec<Polarization>>> = occupancy.iter().map(|&n| branch_choices(n)).collect();
        for hwp in HwpSettings::ALL {
            let mut count = 0;
            let mut passing = 0;
            for b0 in &choices[0] {
                for b1 in &choices[1] {
                    for b2 in &choices[2] {
                        for b3 in &choices[3] {
                            let event = EmissionEvent::from_branches([b0, b1, b2, b3]);
                            let pattern = route_photons(&event, hwp);
                            let coincidence = is_eightfold_coincidence(&pattern);
                            count += 1;
                            passing += usize::from(coincidence);
                            events.push(EventRecord {
                                class: event.class_label(),
                                order: event.order(),
                                event: event.to_string(),
                                hwp,
                                pattern,
                                coincidence,
                            });
                        }
                    }
                }
            }
            classes.push(ClassSummary {
                class: class_label(occupancy),
                occupancy,
                hwp,
                events: count,
                passing,
            });
        }
    }
    EnumerationReport { events, classes }
}
