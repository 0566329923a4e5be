//! Symbolic polynotopes `c + R s_I^E`.
//!
//! Each generator column multiplies one monomial of unit-interval symbols.
//! Monomials are stored sparsely as sorted `(symbol, exponent)` lists, so two
//! columns describe the same monomial exactly when their lists are equal and
//! sums/products cancel like terms without approximation.
//!
//! Canonical form: no repeated monomial, no constant monomial (folded into
//! the center), no all-zero column. The symbol list and exponent matrix of
//! the textbook `⟨c, R, I, E⟩` form are derived on demand.

use std::collections::HashMap;

use indexmap::IndexMap;
use ndarray::{s, Array1, Array2};

use crate::error::{check_dim, Result};
use crate::symbols::{SymbolId, SymbolProvider};
use crate::szono::{Interval, SZonotope};

/// Product of symbol powers, sorted by symbol, exponents positive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<(SymbolId, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Self(Vec::new())
    }

    pub fn var(id: SymbolId) -> Self {
        Self(vec![(id, 1)])
    }

    /// Builds from arbitrary `(symbol, exponent)` pairs, merging repeats.
    pub fn from_powers(powers: impl IntoIterator<Item = (SymbolId, u32)>) -> Self {
        let mut acc: Vec<(SymbolId, u32)> = Vec::new();
        for (id, e) in powers {
            if e == 0 {
                continue;
            }
            match acc.iter_mut().find(|(i, _)| *i == id) {
                Some(slot) => slot.1 += e,
                None => acc.push((id, e)),
            }
        }
        acc.sort_unstable_by_key(|(id, _)| *id);
        Self(acc)
    }

    pub fn powers(&self) -> &[(SymbolId, u32)] {
        &self.0
    }

    pub fn is_constant(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, id: SymbolId) -> u32 {
        self.0
            .iter()
            .find(|(i, _)| *i == id)
            .map_or(0, |(_, e)| *e)
    }

    /// True when every exponent is even, so the monomial ranges over `[0, 1]`.
    pub fn is_even(&self) -> bool {
        !self.0.is_empty() && self.0.iter().all(|(_, e)| e % 2 == 0)
    }

    /// Range over `[-1, 1]^q`.
    pub fn range(&self) -> Interval {
        if self.is_constant() {
            Interval::point(1.0)
        } else if self.is_even() {
            Interval { lo: 0.0, hi: 1.0 }
        } else {
            Interval { lo: -1.0, hi: 1.0 }
        }
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    fn without(&self, id: SymbolId) -> (Monomial, u32) {
        let e = self.exponent(id);
        let rest = self.0.iter().filter(|(i, _)| *i != id).copied().collect();
        (Monomial(rest), e)
    }

    pub fn eval(&self, valuation: &HashMap<SymbolId, f64>) -> f64 {
        self.0
            .iter()
            .map(|(id, e)| valuation.get(id).copied().unwrap_or(0.0).powi(*e as i32))
            .product()
    }
}

/// Symbolic polynotope `c + Σ_k R[:,k] m_k(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SPolynotope {
    center: Array1<f64>,
    generators: Array2<f64>,
    monomials: Vec<Monomial>,
}

/// Accumulates terms, merging equal monomials in first-seen order.
struct Terms {
    dim: usize,
    center: Array1<f64>,
    cols: IndexMap<Monomial, Array1<f64>>,
}

impl Terms {
    fn new(dim: usize) -> Self {
        Self {
            dim,
            center: Array1::zeros(dim),
            cols: IndexMap::new(),
        }
    }

    fn push(&mut self, m: Monomial, coef: Array1<f64>) {
        if m.is_constant() {
            self.center += &coef;
        } else if let Some(col) = self.cols.get_mut(&m) {
            *col += &coef;
        } else {
            self.cols.insert(m, coef);
        }
    }

    fn push_scalar(&mut self, m: Monomial, coef: f64) {
        debug_assert_eq!(self.dim, 1);
        if m.is_constant() {
            self.center[0] += coef;
        } else {
            *self.cols.entry(m).or_insert_with(|| Array1::zeros(1)) += coef;
        }
    }

    fn finish(self) -> SPolynotope {
        let live: Vec<(Monomial, Array1<f64>)> = self
            .cols
            .into_iter()
            .filter(|(_, c)| c.iter().any(|&v| v != 0.0))
            .collect();
        let mut generators = Array2::zeros((self.dim, live.len()));
        let mut monomials = Vec::with_capacity(live.len());
        for (k, (m, c)) in live.into_iter().enumerate() {
            generators.column_mut(k).assign(&c);
            monomials.push(m);
        }
        SPolynotope {
            center: self.center,
            generators,
            monomials,
        }
    }
}

impl SPolynotope {
    /// Builds a canonical polynotope from columns and their monomials.
    pub fn new(
        center: Array1<f64>,
        generators: Array2<f64>,
        monomials: Vec<Monomial>,
    ) -> Result<Self> {
        check_dim("generator rows", center.len(), generators.nrows())?;
        check_dim("generator columns", generators.ncols(), monomials.len())?;
        let mut t = Terms::new(center.len());
        t.center.assign(&center);
        for (k, m) in monomials.into_iter().enumerate() {
            t.push(m, generators.column(k).to_owned());
        }
        Ok(t.finish())
    }

    /// Builds from the `⟨c, R, I, E⟩` form with `E` of shape `|I| × p`.
    pub fn from_exponents(
        center: Array1<f64>,
        generators: Array2<f64>,
        ids: &[SymbolId],
        exponents: &Array2<u32>,
    ) -> Result<Self> {
        check_dim("exponent rows", ids.len(), exponents.nrows())?;
        check_dim("exponent columns", generators.ncols(), exponents.ncols())?;
        let monomials = exponents
            .columns()
            .into_iter()
            .map(|col| Monomial::from_powers(ids.iter().copied().zip(col.iter().copied())))
            .collect();
        Self::new(center, generators, monomials)
    }

    pub fn point(center: Array1<f64>) -> Self {
        let n = center.len();
        Self {
            center,
            generators: Array2::zeros((n, 0)),
            monomials: Vec::new(),
        }
    }

    pub fn scalar(c: f64) -> Self {
        Self::point(Array1::from(vec![c]))
    }

    pub fn symbol(id: SymbolId) -> Self {
        Self {
            center: Array1::zeros(1),
            generators: Array2::ones((1, 1)),
            monomials: vec![Monomial::var(id)],
        }
    }

    /// Exact embedding with identity exponent matrix.
    pub fn from_szonotope(x: &SZonotope) -> Self {
        let mut t = Terms::new(x.dim());
        t.center.assign(x.center());
        for (k, id) in x.ids().iter().enumerate() {
            t.push(Monomial::var(*id), x.generators().column(k).to_owned());
        }
        t.finish()
    }

    /// The s-zonotope with the same terms, if every monomial is linear.
    pub fn to_szonotope(&self) -> Option<SZonotope> {
        let mut ids = Vec::with_capacity(self.monomials.len());
        for m in &self.monomials {
            match m.powers() {
                [(id, 1)] => ids.push(*id),
                _ => return None,
            }
        }
        Some(SZonotope::from_parts(
            self.center.clone(),
            self.generators.clone(),
            ids,
        ))
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn num_monomials(&self) -> usize {
        self.monomials.len()
    }

    pub fn center(&self) -> &Array1<f64> {
        &self.center
    }

    pub fn generators(&self) -> &Array2<f64> {
        &self.generators
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn degree(&self) -> u32 {
        self.monomials.iter().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Symbols in order of first appearance.
    pub fn ids(&self) -> Vec<SymbolId> {
        let mut seen = IndexMap::new();
        for m in &self.monomials {
            for (id, _) in m.powers() {
                seen.entry(*id).or_insert(());
            }
        }
        seen.into_keys().collect()
    }

    /// Exponent matrix `E` (rows follow [`SPolynotope::ids`]).
    pub fn exponent_matrix(&self) -> Array2<u32> {
        let ids = self.ids();
        let row: HashMap<SymbolId, usize> = ids.iter().enumerate().map(|(k, id)| (*id, k)).collect();
        let mut e = Array2::zeros((ids.len(), self.monomials.len()));
        for (k, m) in self.monomials.iter().enumerate() {
            for (id, p) in m.powers() {
                e[[row[id], k]] = *p;
            }
        }
        e
    }

    /// Coefficient column of monomial `m` (zero when absent).
    pub fn coefficient(&self, m: &Monomial) -> Array1<f64> {
        if m.is_constant() {
            return self.center.clone();
        }
        self.monomials
            .iter()
            .position(|x| x == m)
            .map_or_else(|| Array1::zeros(self.dim()), |k| self.generators.column(k).to_owned())
    }

    fn terms(&self) -> Terms {
        let mut t = Terms::new(self.dim());
        t.center.assign(&self.center);
        for (k, m) in self.monomials.iter().enumerate() {
            t.cols.insert(m.clone(), self.generators.column(k).to_owned());
        }
        t
    }

    /// Re-canonicalizes. Values built through the public API are already
    /// canonical, so this is idempotent.
    pub fn canonicalize(&self) -> SPolynotope {
        let mut t = Terms::new(self.dim());
        t.center.assign(&self.center);
        for (k, m) in self.monomials.iter().enumerate() {
            t.push(m.clone(), self.generators.column(k).to_owned());
        }
        t.finish()
    }

    pub fn row(&self, i: usize) -> SPolynotope {
        let mut t = Terms::new(1);
        t.center[0] = self.center[i];
        for (k, m) in self.monomials.iter().enumerate() {
            t.push(m.clone(), Array1::from(vec![self.generators[[i, k]]]));
        }
        t.finish()
    }

    pub fn add(&self, other: &SPolynotope) -> Result<SPolynotope> {
        check_dim("sum", self.dim(), other.dim())?;
        let mut t = self.terms();
        t.center += &other.center;
        for (k, m) in other.monomials.iter().enumerate() {
            t.push(m.clone(), other.generators.column(k).to_owned());
        }
        Ok(t.finish())
    }

    pub fn sub(&self, other: &SPolynotope) -> Result<SPolynotope> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, a: f64) -> SPolynotope {
        if a == 0.0 {
            return Self::point(Array1::zeros(self.dim()));
        }
        Self {
            center: &self.center * a,
            generators: &self.generators * a,
            monomials: self.monomials.clone(),
        }
    }

    pub fn shift(&self, c: f64) -> SPolynotope {
        Self {
            center: &self.center + c,
            generators: self.generators.clone(),
            monomials: self.monomials.clone(),
        }
    }

    pub fn translate(&self, offset: &Array1<f64>) -> Result<SPolynotope> {
        check_dim("translate", self.dim(), offset.len())?;
        Ok(Self {
            center: &self.center + offset,
            generators: self.generators.clone(),
            monomials: self.monomials.clone(),
        })
    }

    pub fn linear_image(&self, m: &Array2<f64>) -> Result<SPolynotope> {
        check_dim("linear image", self.dim(), m.ncols())?;
        let mut t = Terms::new(m.nrows());
        t.center = m.dot(&self.center);
        let g = m.dot(&self.generators);
        for (k, mono) in self.monomials.iter().enumerate() {
            t.cols.insert(mono.clone(), g.column(k).to_owned());
        }
        Ok(t.finish())
    }

    pub fn vcat(&self, other: &SPolynotope) -> SPolynotope {
        Self::vcat_all(&[self.clone(), other.clone()])
    }

    pub fn vcat_all(parts: &[SPolynotope]) -> SPolynotope {
        let n: usize = parts.iter().map(SPolynotope::dim).sum();
        let mut t = Terms::new(n);
        let mut row = 0;
        for p in parts {
            let d = p.dim();
            t.center.slice_mut(s![row..row + d]).assign(&p.center);
            for (k, m) in p.monomials.iter().enumerate() {
                let col = t.cols.entry(m.clone()).or_insert_with(|| Array1::zeros(n));
                col.slice_mut(s![row..row + d])
                    .assign(&p.generators.column(k));
            }
            row += d;
        }
        t.finish()
    }

    /// Exact product of two 1-D polynotopes.
    pub fn multiply(&self, other: &SPolynotope) -> Result<SPolynotope> {
        check_dim("product", 1, self.dim())?;
        check_dim("product", 1, other.dim())?;
        let lhs = self.scalar_terms();
        let rhs = other.scalar_terms();
        let mut t = Terms::new(1);
        for (ma, a) in &lhs {
            for (mb, b) in &rhs {
                t.push_scalar(ma.mul(mb), a * b);
            }
        }
        Ok(t.finish())
    }

    fn scalar_terms(&self) -> Vec<(Monomial, f64)> {
        let mut out = Vec::with_capacity(self.monomials.len() + 1);
        if self.center[0] != 0.0 {
            out.push((Monomial::one(), self.center[0]));
        }
        for (k, m) in self.monomials.iter().enumerate() {
            out.push((m.clone(), self.generators[[0, k]]));
        }
        out
    }

    /// `P^m` by repeated exact multiplication (`m >= 1`).
    pub fn pow(&self, m: u32) -> Result<SPolynotope> {
        check_dim("power", 1, self.dim())?;
        assert!(m >= 1, "exponent must be positive");
        let mut acc = self.clone();
        for _ in 1..m {
            acc = acc.multiply(self)?;
        }
        Ok(acc)
    }

    /// Natural interval extension of a 1-D polynotope: each monomial ranges
    /// over `[0, 1]` when all its exponents are even, `[-1, 1]` otherwise.
    pub fn interval_bound(&self) -> Result<Interval> {
        check_dim("1-D bounds", 1, self.dim())?;
        Ok(self.component_bound(0))
    }

    fn component_bound(&self, i: usize) -> Interval {
        let (mut lo, mut hi) = (self.center[i], self.center[i]);
        for (k, m) in self.monomials.iter().enumerate() {
            let a = self.generators[[i, k]];
            let r = m.range();
            let (x, y) = (a * r.lo, a * r.hi);
            lo += x.min(y);
            hi += x.max(y);
        }
        Interval { lo, hi }
    }

    pub fn interval_hull(&self) -> Vec<Interval> {
        (0..self.dim()).map(|i| self.component_bound(i)).collect()
    }

    /// Branch-and-bound refinement of [`SPolynotope::interval_bound`].
    ///
    /// At each level the symbol with the largest total coefficient weight in
    /// non-linear monomials is bisected. The result is intersected with the
    /// unsplit bound, so it is never wider and shrinks monotonically with
    /// `depth`. Polynotopes that are affine in every symbol are returned
    /// as-is, their natural extension being exact.
    ///
    /// Re-expanding the pieces rounds their coefficients, so each level's
    /// hull is widened by a bound on that rounding and intersected with the
    /// previous level.
    pub fn refine_bound(&self, depth: usize) -> Result<Interval> {
        let base = self.interval_bound()?;
        if depth == 0 || self.split_candidate().is_none() {
            return Ok(base);
        }
        let weight = self.center[0].abs() + self.generators.iter().map(|v| v.abs()).sum::<f64>();
        let mut out = base;
        for d in 1..=depth {
            let hull = self.refine_pieces(d);
            let ops = (d + 1) * (self.degree() as usize + 1) * (self.num_monomials() + 1);
            let pad = ops as f64 * f64::EPSILON * weight;
            let hull = Interval {
                lo: hull.lo - pad,
                hi: hull.hi + pad,
            };
            out = out.intersect(&hull).unwrap_or(out);
        }
        Ok(out)
    }

    fn refine_pieces(&self, depth: usize) -> Interval {
        let base = self.component_bound(0);
        let Some(id) = self.split_candidate().filter(|_| depth > 0) else {
            return base;
        };
        let upper = self.substitute_affine(id, 0.5, 0.5).refine_pieces(depth - 1);
        let lower = self.substitute_affine(id, -0.5, 0.5).refine_pieces(depth - 1);
        let hull = upper.hull(&lower);
        base.intersect(&hull).unwrap_or(hull)
    }

    fn split_candidate(&self) -> Option<SymbolId> {
        let mut weight: IndexMap<SymbolId, f64> = IndexMap::new();
        for (k, m) in self.monomials.iter().enumerate() {
            if m.degree() < 2 {
                continue;
            }
            let a: f64 = self.generators.column(k).iter().map(|v| v.abs()).sum();
            for (id, _) in m.powers() {
                *weight.entry(*id).or_insert(0.0) += a;
            }
        }
        weight
            .into_iter()
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
            .map(|(id, _)| id)
    }

    /// Substitutes `s_id -> offset + slope * s_id` (same identifier).
    pub fn substitute_affine(&self, id: SymbolId, offset: f64, slope: f64) -> SPolynotope {
        let mut t = Terms::new(self.dim());
        t.center.assign(&self.center);
        for (k, m) in self.monomials.iter().enumerate() {
            let col = self.generators.column(k);
            let (rest, e) = m.without(id);
            if e == 0 {
                t.push(m.clone(), col.to_owned());
                continue;
            }
            // (offset + slope s)^e = Σ C(e,j) offset^(e-j) slope^j s^j
            let mut binom = 1.0;
            for j in 0..=e {
                let w = binom * offset.powi((e - j) as i32) * slope.powi(j as i32);
                if w != 0.0 {
                    let mono = rest.mul(&Monomial::from_powers([(id, j)]));
                    t.push(mono, col.mapv(|v| v * w));
                }
                binom = binom * f64::from(e - j) / f64::from(j + 1);
            }
        }
        t.finish()
    }

    /// Keeps the `budget` monomials of degree at most `max_degree` with the
    /// largest generator 2-norm. Every other monomial is enclosed by its
    /// natural range: a center shift plus one fresh symbol per dimension.
    pub fn reduce_monomials(
        &self,
        budget: usize,
        max_degree: u32,
        provider: &SymbolProvider,
    ) -> SPolynotope {
        if self.monomials.len() <= budget && self.degree() <= max_degree {
            return self.clone();
        }
        let mut ranked: Vec<(f64, usize)> = self
            .monomials
            .iter()
            .enumerate()
            .filter(|(_, m)| m.degree() <= max_degree)
            .map(|(k, _)| {
                let c = self.generators.column(k);
                (c.dot(&c).sqrt(), k)
            })
            .collect();
        ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut keep = vec![false; self.monomials.len()];
        for &(_, k) in ranked.iter().take(budget) {
            keep[k] = true;
        }

        let n = self.dim();
        let mut center = self.center.clone();
        let mut radius = Array1::<f64>::zeros(n);
        let mut t = Terms::new(n);
        for (k, m) in self.monomials.iter().enumerate() {
            let col = self.generators.column(k);
            if keep[k] {
                t.cols.insert(m.clone(), col.to_owned());
                continue;
            }
            let r = m.range();
            for i in 0..n {
                center[i] += col[i] * r.mid();
                radius[i] += col[i].abs() * r.rad();
            }
        }
        t.center = center;
        for i in 0..n {
            if radius[i] > 0.0 {
                let mut c = Array1::zeros(n);
                c[i] = radius[i];
                t.cols.insert(Monomial::var(provider.fresh()), c);
            }
        }
        t.finish()
    }

    /// Evaluates at a valuation of the symbols; unlisted symbols take 0.
    pub fn eval(&self, valuation: &HashMap<SymbolId, f64>) -> Array1<f64> {
        let values: Array1<f64> = self.monomials.iter().map(|m| m.eval(valuation)).collect();
        &self.center + &self.generators.dot(&values)
    }
}
