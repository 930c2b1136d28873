//! Basis bookkeeping for the four-component pair-of-pairs states.
//!
//! The four basis vectors are written α, β, γ, κ throughout. Matrix entries
//! never change when a basis is relabeled; only these labels do.

use std::fmt;

use crate::fock::{Spin, Statistics};

const TILDE: char = '\u{303}';

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    /// Plain two-qubit ordering `|00⟩, |01⟩, |10⟩, |11⟩`.
    Computational,
    /// Product of the two side states before any local operation.
    Initial,
    /// Bob's L-side spins inverted ahead of the splitters.
    SpinFlipped,
    /// `steps` Bob pairs have passed a splitter and been post-selected.
    PostSelected { steps: u32, statistics: Statistics },
    /// All Bob pairs processed; one collective Bob state per component.
    Final { steps: u32, statistics: Statistics },
}

pub const COMPONENT_NAMES: [&str; 4] = ["α", "β", "γ", "κ"];

/// Alice's (L, R) spins and Bob's pre-flip (L, R) spins for α, β, γ, κ.
const SPINS: [[Spin; 4]; 4] = [
    [Spin::Up, Spin::Up, Spin::Down, Spin::Down],
    [Spin::Up, Spin::Down, Spin::Down, Spin::Up],
    [Spin::Down, Spin::Up, Spin::Up, Spin::Down],
    [Spin::Down, Spin::Down, Spin::Up, Spin::Up],
];

fn block(party: char, spin: Spin, power: &str, side: char) -> String {
    format!("|{party}{}{TILDE}⟩{power}_{side}", spin.arrow())
}

fn kept_pair_name(statistics: Statistics) -> &'static str {
    match statistics {
        Statistics::Fermion => "B_triplet",
        Statistics::Boson => "B_bunched",
    }
}

impl Basis {
    pub fn labels(&self) -> [String; 4] {
        std::array::from_fn(|i| self.label(i))
    }

    pub fn label(&self, component: usize) -> String {
        let [al, ar, bl, br] = SPINS[component];
        let alice = format!("{}{}", block('A', al, "ⁿ", 'L'), block('A', ar, "ⁿ", 'R'));
        match *self {
            Basis::Computational => {
                let bits = ["00", "01", "10", "11"];
                format!("|{}⟩", bits[component])
            }
            Basis::Initial => {
                format!("{alice}{}{}", block('B', bl, "ⁿ", 'L'), block('B', br, "ⁿ", 'R'))
            }
            Basis::SpinFlipped => format!(
                "{alice}{}{}",
                block('B', bl.flipped(), "ⁿ", 'L'),
                block('B', br, "ⁿ", 'R')
            ),
            Basis::PostSelected { steps, statistics } => {
                let rest = format!("^(n-{steps})");
                let processed = if component == 0 || component == 3 {
                    format!("|{}⟩^⊗{steps}", kept_pair_name(statistics))
                } else {
                    format!(
                        "({}{})^⊗{steps}",
                        block('B', bl.flipped(), "", 'L'),
                        block('B', br, "", 'R')
                    )
                };
                format!(
                    "{alice}{processed}{}{}",
                    block('B', bl.flipped(), &rest, 'L'),
                    block('B', br, &rest, 'R')
                )
            }
            Basis::Final { statistics, .. } => {
                if component == 0 || component == 3 {
                    format!("{alice}|{}⟩", kept_pair_name(statistics))
                } else {
                    format!(
                        "{alice}{}{}",
                        block('B', bl.flipped(), "", 'L'),
                        block('B', br, "", 'R')
                    )
                }
            }
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::Computational => f.write_str("computational"),
            Basis::Initial => f.write_str("initial"),
            Basis::SpinFlipped => f.write_str("spin-flipped"),
            Basis::PostSelected { steps, statistics } => {
                write!(f, "post-selected ({statistics}, {steps} steps)")
            }
            Basis::Final { steps, statistics } => write!(f, "final ({statistics}, {steps} steps)"),
        }
    }
}
