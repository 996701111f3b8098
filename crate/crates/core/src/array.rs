//! CAM words and arrays, writes under the bias scheme, match-line loading,
//! and the exact Hamming-distance oracle.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::device::{apply_write_pulse, effective_cell_capacitance, BiasScheme, PolarizationState};
use crate::error::{CamError, Result};
use crate::variation::SampledCellParams;

/// How a cell's capacitance is evaluated on the match line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoadMode {
    /// Exactly `c_lcs` on match, `c_hcs` on mismatch.
    Table,
    /// C–V curve at the instantaneous ML voltage.
    Physical,
}

/// Packed-free bit vector; one `bool` per column.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bits(pub Vec<bool>);

impl Bits {
    pub fn zeros(n: usize) -> Self {
        Bits(vec![false; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    /// Copy with the first `k` bits inverted.
    pub fn flip_prefix(&self, k: usize) -> Bits {
        let mut out = self.clone();
        for b in out.0.iter_mut().take(k) {
            *b = !*b;
        }
        out
    }

    /// Low `n` bits of `value`, most significant first.
    pub fn from_u64(value: u64, n: usize) -> Bits {
        Bits((0..n).rev().map(|i| (value >> i) & 1 == 1).collect())
    }
}

impl FromStr for Bits {
    type Err = CamError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(CamError::Parse("empty bit string".into()));
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(CamError::Parse(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Bits)
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

pub type SearchQuery = Bits;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellInstance {
    pub state: PolarizationState,
    pub params: SampledCellParams,
}

/// One match line: N cells plus the fixed wiring/driver parasitic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CamWord {
    cells: Vec<CellInstance>,
    c_fixed: f64,
}

impl CamWord {
    pub fn new(cells: Vec<CellInstance>, c_fixed: f64) -> Result<Self> {
        if cells.is_empty() {
            return Err(CamError::config("experiment.n_bits", "a word needs at least one cell"));
        }
        if !(c_fixed >= 0.0 && c_fixed.is_finite()) {
            return Err(CamError::config("array.c_fixed", "must be finite and >= 0"));
        }
        Ok(Self { cells, c_fixed })
    }

    /// Word with every cell sharing `params`, all cells in `P_NEG`.
    pub fn uniform(n: usize, params: SampledCellParams, c_fixed: f64) -> Result<Self> {
        let cell = CellInstance {
            state: PolarizationState::Neg,
            params,
        };
        Self::new(vec![cell; n], c_fixed)
    }

    /// Word whose states are set directly from `bits` (no write pulses).
    pub fn from_bits(bits: &Bits, params: impl Fn(usize) -> SampledCellParams, c_fixed: f64) -> Result<Self> {
        let cells = bits
            .0
            .iter()
            .enumerate()
            .map(|(i, &b)| CellInstance {
                state: PolarizationState::from_bit(b),
                params: params(i),
            })
            .collect();
        Self::new(cells, c_fixed)
    }

    pub fn width(&self) -> usize {
        self.cells.len()
    }

    pub fn cells(&self) -> &[CellInstance] {
        &self.cells
    }

    pub fn c_fixed(&self) -> f64 {
        self.c_fixed
    }

    pub fn stored_bits(&self) -> Bits {
        Bits(self.cells.iter().map(|c| c.state.bit()).collect())
    }

    fn check_width(&self, n: usize) -> Result<()> {
        if n != self.width() {
            return Err(CamError::LengthMismatch {
                expected: self.width(),
                got: n,
            });
        }
        Ok(())
    }
}

/// M words of uniform width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CamArray {
    words: Vec<CamWord>,
}

impl CamArray {
    pub fn new(words: Vec<CamWord>) -> Result<Self> {
        if let Some(first) = words.first() {
            for w in &words {
                first.check_width(w.width())?;
            }
        }
        Ok(Self { words })
    }

    pub fn words(&self) -> &[CamWord] {
        &self.words
    }

    pub fn width(&self) -> Option<usize> {
        self.words.first().map(CamWord::width)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn stored_rows(&self) -> Vec<Bits> {
        self.words.iter().map(CamWord::stored_bits).collect()
    }
}

/// Program every cell to `bits`.
///
/// Two-phase write with ideal column inhibit: a `v_write_1` pulse on the
/// columns selected for 1, then `v_write_0` on the remaining columns.
pub fn write_word(word: &CamWord, bits: &Bits, bias: &BiasScheme) -> Result<CamWord> {
    word.check_width(bits.len())?;
    let mut out = word.clone();
    for phase in [true, false] {
        let amplitude = bias.write_amplitude(phase);
        for (cell, &target) in out.cells.iter_mut().zip(&bits.0) {
            if target == phase {
                cell.state = apply_write_pulse(cell.state, amplitude, bias.t_write, &cell.params.memcap);
            }
        }
    }
    Ok(out)
}

/// Total match-line capacitance for `query` at ML voltage `v_ml`.
pub fn build_ml_load(word: &CamWord, query: &SearchQuery, bias: &BiasScheme, v_ml: f64, mode: LoadMode) -> Result<f64> {
    word.check_width(query.len())?;
    let mut total = word.c_fixed;
    for (cell, &q) in word.cells.iter().zip(&query.0) {
        let stored = cell.state.bit();
        let mc = &cell.params.memcap;
        total += match mode {
            LoadMode::Table => {
                if stored == q {
                    mc.c_lcs
                } else {
                    mc.c_hcs
                }
            }
            LoadMode::Physical => effective_cell_capacitance(mc, stored, q, bias, v_ml)?,
        };
    }
    Ok(total)
}

pub fn hamming_distance(a: &Bits, b: &Bits) -> Result<usize> {
    if a.len() != b.len() {
        return Err(CamError::LengthMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(a.0.iter().zip(&b.0).filter(|(x, y)| x != y).count())
}

/// Parse bit-row text: one word per line of '0'/'1'. Blank lines are skipped.
pub fn parse_bit_rows(text: &str) -> Result<Vec<Bits>> {
    let mut rows: Vec<Bits> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bits: Bits = line
            .parse()
            .map_err(|e| CamError::Parse(format!("line {}: {e}", lineno + 1)))?;
        if let Some(first) = rows.first() {
            if first.len() != bits.len() {
                return Err(CamError::Parse(format!(
                    "line {}: width {} differs from first row width {}",
                    lineno + 1,
                    bits.len(),
                    first.len()
                )));
            }
        }
        rows.push(bits);
    }
    Ok(rows)
}

pub fn format_bit_rows(rows: &[Bits]) -> String {
    let mut out = String::new();
    for r in rows {
        out.push_str(&r.to_string());
        out.push('\n');
    }
    out
}

pub fn read_bit_rows(path: &Path) -> Result<Vec<Bits>> {
    parse_bit_rows(&std::fs::read_to_string(path)?)
}

pub fn write_bit_rows(path: &Path, rows: &[Bits]) -> Result<()> {
    std::fs::write(path, format_bit_rows(rows))?;
    Ok(())
}
