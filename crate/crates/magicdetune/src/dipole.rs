//! Hyperfine dipole matrix elements for the three light polarizations.
//!
//! Everything downstream of the Wigner symbols is expressed through three
//! families of elements connecting a ground Zeeman state `|F, m>` to the
//! excited manifolds `F'`: `r` drives sigma-plus transitions (`m -> m+1`),
//! `s` drives sigma-minus (`m -> m-1`), and `t` drives pi (`m -> m`). The
//! reduced units absorb the electronic matrix element, so
//!
//! ```text
//! element = (-1)^(m-F) sqrt(2F'+1) {J J' 1; F' F I} (F 1 F'; m q -m-q)
//! ```
//!
//! with `q = +1, -1, 0` respectively. Squares of these elements are exact
//! rationals, which the detuning solvers exploit.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_rational::BigRational;

use crate::error::Result;
use crate::halfint::HalfInt;
use crate::wigner::{wigner_3j, wigner_6j, CouplingValue};

/// Which spherical component of the drive field an element belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DipoleKind {
    /// `r` elements, polarization q = +1.
    SigmaPlus,
    /// `s` elements, polarization q = -1.
    SigmaMinus,
    /// `t` elements, polarization q = 0.
    Pi,
}

impl DipoleKind {
    /// The spherical index q carried by this component.
    pub fn q(self) -> HalfInt {
        match self {
            DipoleKind::SigmaPlus => HalfInt::ONE,
            DipoleKind::SigmaMinus => -HalfInt::ONE,
            DipoleKind::Pi => HalfInt::ZERO,
        }
    }

    pub const ALL: [DipoleKind; 3] = [DipoleKind::SigmaPlus, DipoleKind::SigmaMinus, DipoleKind::Pi];
}

/// One evaluated element, tagged with the quantum numbers that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct DipoleElement {
    pub kind: DipoleKind,
    pub m: HalfInt,
    pub f: HalfInt,
    pub fp: HalfInt,
    pub value: f64,
}

/// The element connecting `|F, m>` to the excited manifold `F'`, exactly.
pub fn dipole_element_exact(
    kind: DipoleKind,
    m: HalfInt,
    f: HalfInt,
    fp: HalfInt,
    i: HalfInt,
    j: HalfInt,
    jp: HalfInt,
) -> Result<CouplingValue> {
    let q = kind.q();
    let sixj = wigner_6j(j, jp, HalfInt::ONE, fp, f, i)?;
    let threej = wigner_3j(f, HalfInt::ONE, fp, m, q, -(m + q))?;
    let product = &sixj * &threej;
    let weight = BigRational::from_integer((fp.twice() + 1).into());
    // m - F is an integer whenever the 3-j call above accepted (F, m).
    let phase = (m - f).twice() / 2;
    Ok(product.scaled_by_sqrt(&weight).with_phase(phase))
}

/// Floating-point version of [`dipole_element_exact`].
pub fn dipole_element(
    kind: DipoleKind,
    m: HalfInt,
    f: HalfInt,
    fp: HalfInt,
    i: HalfInt,
    j: HalfInt,
    jp: HalfInt,
) -> Result<f64> {
    Ok(dipole_element_exact(kind, m, f, fp, i, j, jp)?.to_f64())
}

/// All elements leaving one ground state `|F, m>`: every kind crossed with
/// every manifold `F' in {F-1, F, F+1}` that is a valid momentum.
#[derive(Clone, Debug)]
pub struct DipoleRow {
    entries: Vec<DipoleElement>,
}

impl DipoleRow {
    /// The stored value, or 0 for any combination outside the row's domain.
    pub fn get(&self, kind: DipoleKind, fp: HalfInt) -> f64 {
        self.entries
            .iter()
            .find(|e| e.kind == kind && e.fp == fp)
            .map_or(0.0, |e| e.value)
    }

    /// Every entry, kinds grouped together, `F'` ascending within a kind.
    pub fn entries(&self) -> &[DipoleElement] {
        &self.entries
    }
}

/// Evaluates the full row for one ground state.
pub fn dipole_row(
    f: HalfInt,
    m: HalfInt,
    i: HalfInt,
    j: HalfInt,
    jp: HalfInt,
) -> Result<DipoleRow> {
    f.require_momentum("F")?;
    let mut entries = Vec::new();
    for kind in DipoleKind::ALL {
        for l in [-1, 0, 1] {
            let fp = f + HalfInt::from_int(l);
            if fp.twice() < 0 {
                continue;
            }
            let value = dipole_element(kind, m, f, fp, i, j, jp)?;
            entries.push(DipoleElement { kind, m, f, fp, value });
        }
    }
    Ok(DipoleRow { entries })
}

/// One excited manifold's coupling to the ground manifold, with the exact
/// 6-j symbol whose square is the manifold's relative strength.
#[derive(Clone, Debug)]
pub(crate) struct LineCoupling {
    /// Offset l with `F' = F + l`.
    pub l: i32,
    pub fp: HalfInt,
    /// The 6-j `{J J' 1; F' F I}`; nonzero for every stored line.
    pub sixj: CouplingValue,
}

impl LineCoupling {
    /// The exact relative strength `|6j|^2` of this manifold.
    pub fn strength(&self) -> &BigRational {
        self.sixj.square()
    }
}

/// The `(r, s, t)` values leaving one ground state through one manifold.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct ElementTriple {
    pub r: f64,
    pub s: f64,
    pub t: f64,
}

/// Precomputed dipole data for one `(J, J', F, I)` combination: the surviving
/// manifolds and the float elements for every ground Zeeman state. Splittings
/// are deliberately not part of the key, so isotopes sharing quantum numbers
/// share a table.
#[derive(Debug)]
pub(crate) struct DipoleTable {
    two_f: i32,
    lines: Vec<LineCoupling>,
    element_rows: Vec<Vec<ElementTriple>>,
}

impl DipoleTable {
    fn build(j: HalfInt, jp: HalfInt, f: HalfInt, i: HalfInt) -> Result<DipoleTable> {
        f.require_momentum("F")?;
        i.require_momentum("I")?;
        j.require_momentum("J")?;
        jp.require_momentum("J'")?;

        let mut lines = Vec::new();
        for l in [1, 0, -1] {
            let fp = f + HalfInt::from_int(l);
            if fp.twice() < 0 {
                continue;
            }
            let sixj = wigner_6j(j, jp, HalfInt::ONE, fp, f, i)?;
            if !sixj.is_zero() {
                lines.push(LineCoupling { l, fp, sixj });
            }
        }

        let mut element_rows = Vec::new();
        let mut m2 = -f.twice();
        while m2 <= f.twice() {
            let m = HalfInt::from_twice(m2);
            let mut row = Vec::with_capacity(lines.len());
            for line in &lines {
                row.push(ElementTriple {
                    r: dipole_element(DipoleKind::SigmaPlus, m, f, line.fp, i, j, jp)?,
                    s: dipole_element(DipoleKind::SigmaMinus, m, f, line.fp, i, j, jp)?,
                    t: dipole_element(DipoleKind::Pi, m, f, line.fp, i, j, jp)?,
                });
            }
            element_rows.push(row);
            m2 += 2;
        }

        Ok(DipoleTable { two_f: f.twice(), lines, element_rows })
    }

    /// Surviving manifolds in `l = +1, 0, -1` order.
    pub fn lines(&self) -> &[LineCoupling] {
        &self.lines
    }

    /// The line with offset `l`, if that manifold exists and couples.
    pub fn line(&self, l: i32) -> Option<&LineCoupling> {
        self.lines.iter().find(|line| line.l == l)
    }

    /// Ground-state projections `-F ..= F`.
    pub fn m_values(&self) -> impl Iterator<Item = HalfInt> + '_ {
        (-self.two_f..=self.two_f).step_by(2).map(HalfInt::from_twice)
    }

    /// Whether `m` is a projection of this ground manifold.
    pub fn holds(&self, m: HalfInt) -> bool {
        m.twice().abs() <= self.two_f && (m.twice() - self.two_f) % 2 == 0
    }

    /// Elements leaving `|F, m>`, one triple per stored line, same order as
    /// [`lines`](Self::lines). Panics when `m` is not a valid projection.
    pub fn elements(&self, m: HalfInt) -> &[ElementTriple] {
        assert!(self.holds(m), "m = {m} is not a projection of this manifold");
        &self.element_rows[((m.twice() + self.two_f) / 2) as usize]
    }
}

/// Returns the cached table for the given quantum numbers, building it on
/// first use.
pub(crate) fn coupling_table(
    j: HalfInt,
    jp: HalfInt,
    f: HalfInt,
    i: HalfInt,
) -> Result<Arc<DipoleTable>> {
    static CACHE: OnceLock<Mutex<HashMap<(i32, i32, i32, i32), Arc<DipoleTable>>>> =
        OnceLock::new();
    let key = (j.twice(), jp.twice(), f.twice(), i.twice());
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(table) = cache.lock().unwrap().get(&key) {
        return Ok(Arc::clone(table));
    }
    let table = Arc::new(DipoleTable::build(j, jp, f, i)?);
    let mut guard = cache.lock().unwrap();
    Ok(Arc::clone(guard.entry(key).or_insert(table)))
}

/// [`coupling_table`] keyed by an atom record.
pub(crate) fn record_table(record: &crate::atomic_data::AtomRecord) -> Result<Arc<DipoleTable>> {
    coupling_table(record.ground_j, record.excited_j, record.f, record.nuclear_spin)
}
