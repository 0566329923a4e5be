//! Symbolic zonotopes `c + R s_I` and their inclusion-preserving algebra.
//!
//! Generator columns are labelled by [`SymbolId`]s. Binary operations first
//! rewrite both operands over a common identifier vector (see
//! [`crate::symbols::align`]), so shared symbols combine column-wise and
//! dependencies cancel exactly (`x - x = 0`).

use std::collections::{HashMap, HashSet};

use ndarray::{s, Array1, Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{check_dim, Error, Result};
use crate::symbols::{align, SymbolId, SymbolProvider};

/// Closed real interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo <= hi {
            Ok(Self { lo, hi })
        } else {
            Err(Error::InvalidInterval { lo, hi })
        }
    }

    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn centered(mid: f64, rad: f64) -> Self {
        Self {
            lo: mid - rad,
            hi: mid + rad,
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn rad(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Intersection, or `None` when empty.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }
}

/// `{x : H x <= r}`. A polyhedron with no rows is the whole space.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyhedron {
    h: Array2<f64>,
    r: Array1<f64>,
}

impl Polyhedron {
    pub fn new(h: Array2<f64>, r: Array1<f64>) -> Result<Self> {
        check_dim("polyhedron rows", h.nrows(), r.len())?;
        if h.iter().chain(r.iter()).any(|v| v.is_nan()) {
            return Err(Error::NonFinite("polyhedron"));
        }
        Ok(Self { h, r })
    }

    pub fn whole_space(dim: usize) -> Self {
        Self {
            h: Array2::zeros((0, dim)),
            r: Array1::zeros(0),
        }
    }

    /// Box `lo <= x <= hi`; infinite bounds produce no constraint.
    pub fn from_box(lo: &[f64], hi: &[f64]) -> Result<Self> {
        check_dim("box bounds", lo.len(), hi.len())?;
        let n = lo.len();
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for i in 0..n {
            if hi[i].is_finite() {
                let mut row = vec![0.0; n];
                row[i] = 1.0;
                rows.push(row);
                rhs.push(hi[i]);
            }
            if lo[i].is_finite() {
                let mut row = vec![0.0; n];
                row[i] = -1.0;
                rows.push(row);
                rhs.push(-lo[i]);
            }
        }
        let h = Array2::from_shape_vec((rows.len(), n), rows.concat())
            .expect("row lengths are uniform");
        Self::new(h, Array1::from(rhs))
    }

    pub fn dim(&self) -> usize {
        self.h.ncols()
    }

    pub fn num_constraints(&self) -> usize {
        self.h.nrows()
    }

    pub fn normals(&self) -> ArrayView2<'_, f64> {
        self.h.view()
    }

    pub fn offsets(&self) -> ArrayView1<'_, f64> {
        self.r.view()
    }

    pub fn contains_point(&self, x: ArrayView1<'_, f64>) -> bool {
        self.h
            .outer_iter()
            .zip(self.r.iter())
            .all(|(row, &r)| row.dot(&x) <= r)
    }
}

/// Symbolic zonotope `⟨c, R, I⟩ = c + R s_I`.
///
/// Identifiers are pairwise distinct; constructors sum columns that carry
/// the same identifier. All-zero columns are retained.
#[derive(Debug, Clone, PartialEq)]
pub struct SZonotope {
    center: Array1<f64>,
    generators: Array2<f64>,
    ids: Vec<SymbolId>,
}

impl SZonotope {
    pub fn new(center: Array1<f64>, generators: Array2<f64>, ids: Vec<SymbolId>) -> Result<Self> {
        check_dim("generator rows", center.len(), generators.nrows())?;
        check_dim("generator columns", generators.ncols(), ids.len())?;
        if center.iter().chain(generators.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("s-zonotope"));
        }
        let mut seen: HashMap<SymbolId, usize> = HashMap::with_capacity(ids.len());
        if ids.iter().all(|id| seen.insert(*id, 0).is_none()) {
            return Ok(Self {
                center,
                generators,
                ids,
            });
        }
        // duplicate identifiers: merge columns
        seen.clear();
        let mut merged_ids = Vec::new();
        let mut cols: Vec<Array1<f64>> = Vec::new();
        for (k, id) in ids.iter().enumerate() {
            match seen.get(id) {
                Some(&slot) => cols[slot] += &generators.column(k),
                None => {
                    seen.insert(*id, cols.len());
                    merged_ids.push(*id);
                    cols.push(generators.column(k).to_owned());
                }
            }
        }
        let mut g = Array2::zeros((center.len(), cols.len()));
        for (k, col) in cols.iter().enumerate() {
            g.column_mut(k).assign(col);
        }
        Ok(Self {
            center,
            generators: g,
            ids: merged_ids,
        })
    }

    /// Builds without checks; callers guarantee shape and distinct ids.
    pub(crate) fn from_parts(
        center: Array1<f64>,
        generators: Array2<f64>,
        ids: Vec<SymbolId>,
    ) -> Self {
        debug_assert_eq!(center.len(), generators.nrows());
        debug_assert_eq!(generators.ncols(), ids.len());
        Self {
            center,
            generators,
            ids,
        }
    }

    pub fn point(center: Array1<f64>) -> Self {
        let n = center.len();
        Self {
            center,
            generators: Array2::zeros((n, 0)),
            ids: Vec::new(),
        }
    }

    pub fn scalar(c: f64) -> Self {
        Self::point(Array1::from(vec![c]))
    }

    /// The 1-D set `s_id`.
    pub fn symbol(id: SymbolId) -> Self {
        Self {
            center: Array1::zeros(1),
            generators: Array2::ones((1, 1)),
            ids: vec![id],
        }
    }

    /// Axis-aligned box with one fresh symbol per non-degenerate dimension.
    pub fn from_box(lo: &[f64], hi: &[f64], provider: &SymbolProvider) -> Result<Self> {
        check_dim("box bounds", lo.len(), hi.len())?;
        let n = lo.len();
        let mut center = Array1::zeros(n);
        let mut radii = Vec::new();
        for i in 0..n {
            let iv = Interval::new(lo[i], hi[i])?;
            center[i] = iv.mid();
            if iv.rad() > 0.0 {
                radii.push((i, iv.rad()));
            }
        }
        let ids = provider.fresh_ids(radii.len());
        let mut g = Array2::zeros((n, radii.len()));
        for (k, (i, r)) in radii.into_iter().enumerate() {
            g[[i, k]] = r;
        }
        Self::new(center, g, ids)
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn num_symbols(&self) -> usize {
        self.ids.len()
    }

    pub fn center(&self) -> &Array1<f64> {
        &self.center
    }

    pub fn generators(&self) -> &Array2<f64> {
        &self.generators
    }

    pub fn ids(&self) -> &[SymbolId] {
        &self.ids
    }

    pub fn position(&self, id: SymbolId) -> Option<usize> {
        self.ids.iter().position(|&i| i == id)
    }

    pub fn column(&self, id: SymbolId) -> Option<ArrayView1<'_, f64>> {
        self.position(id).map(|k| self.generators.column(k))
    }

    /// Projection onto component `i` as a 1-D s-zonotope over the same symbols.
    pub fn row(&self, i: usize) -> SZonotope {
        Self {
            center: Array1::from(vec![self.center[i]]),
            generators: self.generators.slice(s![i..i + 1, ..]).to_owned(),
            ids: self.ids.clone(),
        }
    }

    pub fn linear_image(&self, m: &Array2<f64>) -> Result<SZonotope> {
        check_dim("linear image", self.dim(), m.ncols())?;
        Ok(Self {
            center: m.dot(&self.center),
            generators: m.dot(&self.generators),
            ids: self.ids.clone(),
        })
    }

    pub fn scale(&self, a: f64) -> SZonotope {
        Self {
            center: &self.center * a,
            generators: &self.generators * a,
            ids: self.ids.clone(),
        }
    }

    pub fn neg(&self) -> SZonotope {
        self.scale(-1.0)
    }

    pub fn translate(&self, offset: &Array1<f64>) -> Result<SZonotope> {
        check_dim("translate", self.dim(), offset.len())?;
        Ok(Self {
            center: &self.center + offset,
            generators: self.generators.clone(),
            ids: self.ids.clone(),
        })
    }

    /// Adds `c` to every component.
    pub fn shift(&self, c: f64) -> SZonotope {
        Self {
            center: &self.center + c,
            generators: self.generators.clone(),
            ids: self.ids.clone(),
        }
    }

    pub fn add(&self, other: &SZonotope) -> Result<SZonotope> {
        check_dim("sum", self.dim(), other.dim())?;
        let center = &self.center + &other.center;
        if self.ids == other.ids {
            return Ok(Self {
                center,
                generators: &self.generators + &other.generators,
                ids: self.ids.clone(),
            });
        }
        let a = align(&self.ids, &other.ids);
        let mut g = Array2::zeros((self.dim(), a.ids.len()));
        for (k, &dst) in a.left.iter().enumerate() {
            g.column_mut(dst).assign(&self.generators.column(k));
        }
        for (k, &dst) in a.right.iter().enumerate() {
            let mut col = g.column_mut(dst);
            col += &other.generators.column(k);
        }
        Ok(Self {
            center,
            generators: g,
            ids: a.ids,
        })
    }

    pub fn sub(&self, other: &SZonotope) -> Result<SZonotope> {
        self.add(&other.neg())
    }

    /// Vertical concatenation `[X; Y]` over the common symbols.
    pub fn vcat(&self, other: &SZonotope) -> SZonotope {
        let a = align(&self.ids, &other.ids);
        let (n, m) = (self.dim(), other.dim());
        let mut g = Array2::zeros((n + m, a.ids.len()));
        for (k, &dst) in a.left.iter().enumerate() {
            g.slice_mut(s![..n, dst])
                .assign(&self.generators.column(k));
        }
        for (k, &dst) in a.right.iter().enumerate() {
            g.slice_mut(s![n.., dst])
                .assign(&other.generators.column(k));
        }
        let mut center = Array1::zeros(n + m);
        center.slice_mut(s![..n]).assign(&self.center);
        center.slice_mut(s![n..]).assign(&other.center);
        Self {
            center,
            generators: g,
            ids: a.ids,
        }
    }

    /// Stacks several sets, matching symbols across all of them.
    pub fn vcat_all(parts: &[SZonotope]) -> SZonotope {
        let mut slot: HashMap<SymbolId, usize> = HashMap::new();
        let mut ids = Vec::new();
        for p in parts {
            for &id in &p.ids {
                slot.entry(id).or_insert_with(|| {
                    ids.push(id);
                    ids.len() - 1
                });
            }
        }
        let n: usize = parts.iter().map(SZonotope::dim).sum();
        let mut center = Array1::zeros(n);
        let mut g = Array2::zeros((n, ids.len()));
        let mut row = 0;
        for p in parts {
            let d = p.dim();
            center.slice_mut(s![row..row + d]).assign(&p.center);
            for (k, id) in p.ids.iter().enumerate() {
                g.slice_mut(s![row..row + d, slot[id]])
                    .assign(&p.generators.column(k));
            }
            row += d;
        }
        Self {
            center,
            generators: g,
            ids,
        }
    }

    /// `[c - ‖R‖₁, c + ‖R‖₁]` of a 1-D set.
    pub fn bounds_1d(&self) -> Result<Interval> {
        check_dim("1-D bounds", 1, self.dim())?;
        Ok(self.component_bounds(0))
    }

    fn component_bounds(&self, i: usize) -> Interval {
        let rad: f64 = self.generators.row(i).iter().map(|v| v.abs()).sum();
        Interval::centered(self.center[i], rad)
    }

    pub fn interval_hull(&self) -> Vec<Interval> {
        (0..self.dim()).map(|i| self.component_bounds(i)).collect()
    }

    /// Inclusion-preserving product of two 1-D sets. One fresh symbol
    /// carries the quadratic remainder.
    pub fn multiply(&self, other: &SZonotope, provider: &SymbolProvider) -> Result<SZonotope> {
        check_dim("product", 1, self.dim())?;
        check_dim("product", 1, other.dim())?;
        let a = align(&self.ids, &other.ids);
        let k = a.ids.len();
        let mut r = vec![0.0; k];
        let mut g = vec![0.0; k];
        for (i, &dst) in a.left.iter().enumerate() {
            r[dst] = self.generators[[0, i]];
        }
        for (i, &dst) in a.right.iter().enumerate() {
            g[dst] = other.generators[[0, i]];
        }
        let (cx, cy) = (self.center[0], other.center[0]);

        let mut center = cx * cy;
        let mut remainder = 0.0;
        let active: Vec<usize> = (0..k).filter(|&i| r[i] != 0.0 || g[i] != 0.0).collect();
        for (pos, &i) in active.iter().enumerate() {
            let rg = r[i] * g[i];
            center += 0.5 * rg;
            remainder += 0.5 * rg.abs();
            for &l in &active[pos + 1..] {
                remainder += (r[i] * g[l] + r[l] * g[i]).abs();
            }
        }

        let fresh = provider.fresh();
        let mut gen = Array2::zeros((1, k + 1));
        for i in 0..k {
            gen[[0, i]] = cx * g[i] + cy * r[i];
        }
        gen[[0, k]] = remainder;
        let mut ids = a.ids;
        ids.push(fresh);
        Ok(Self {
            center: Array1::from(vec![center]),
            generators: gen,
            ids,
        })
    }

    /// Box-method order reduction to at most `order` symbols.
    ///
    /// Zero columns outside `protected` are removed first. If more symbols
    /// remain than `order`, the `p - order + n` unprotected columns of
    /// smallest Euclidean norm (ties: smaller id first) are replaced by an
    /// axis-aligned box on fresh symbols, one per dimension with non-zero
    /// radius.
    pub fn reduce(
        &self,
        order: usize,
        protected: &[SymbolId],
        provider: &SymbolProvider,
    ) -> Result<SZonotope> {
        let p = self.num_symbols();
        if p <= order {
            return Ok(self.clone());
        }
        let n = self.dim();
        let protected: HashSet<SymbolId> = protected.iter().copied().collect();
        let is_protected = |k: usize| protected.contains(&self.ids[k]);

        let mut keep = vec![true; p];
        let mut ranked: Vec<(f64, SymbolId, usize)> = Vec::new();
        for (k, kept) in keep.iter_mut().enumerate() {
            if is_protected(k) {
                continue;
            }
            let norm = self.generators.column(k).dot(&self.generators.column(k)).sqrt();
            if norm == 0.0 {
                *kept = false;
            } else {
                ranked.push((norm, self.ids[k], k));
            }
        }
        let live = keep.iter().filter(|&&b| b).count();
        if live <= order {
            return Ok(self.select_columns(&keep));
        }
        let required = protected.iter().filter(|id| self.position(**id).is_some()).count() + n;
        if order < n {
            return Err(Error::ReductionOrder { order, required });
        }
        let drop = live - order + n;
        if drop > ranked.len() {
            return Err(Error::ReductionOrder { order, required });
        }
        ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut radius = Array1::<f64>::zeros(n);
        for &(_, _, k) in &ranked[..drop] {
            keep[k] = false;
            radius.zip_mut_with(&self.generators.column(k), |acc, v| *acc += v.abs());
        }
        let kept = self.select_columns(&keep);
        let box_rows: Vec<usize> = (0..n).filter(|&i| radius[i] > 0.0).collect();
        let box_ids = provider.fresh_ids(box_rows.len());
        let mut g = Array2::zeros((n, kept.num_symbols() + box_rows.len()));
        g.slice_mut(s![.., ..kept.num_symbols()])
            .assign(&kept.generators);
        for (j, &i) in box_rows.iter().enumerate() {
            g[[i, kept.num_symbols() + j]] = radius[i];
        }
        let mut ids = kept.ids;
        ids.extend(box_ids);
        Ok(Self {
            center: self.center.clone(),
            generators: g,
            ids,
        })
    }

    fn select_columns(&self, keep: &[bool]) -> SZonotope {
        let cols: Vec<usize> = (0..keep.len()).filter(|&k| keep[k]).collect();
        Self {
            center: self.center.clone(),
            generators: self.generators.select(Axis(1), &cols),
            ids: cols.iter().map(|&k| self.ids[k]).collect(),
        }
    }

    /// `sup { hᵀx : x ∈ X }` = `hᵀc + ‖hᵀR‖₁`.
    pub fn support(&self, h: ArrayView1<'_, f64>) -> Result<f64> {
        check_dim("support direction", self.dim(), h.len())?;
        let spread: f64 = h.dot(&self.generators).iter().map(|v| v.abs()).sum();
        Ok(h.dot(&self.center) + spread)
    }

    /// Sufficient test for `X ∩ A = ∅`: some row of `A` has its infimum over
    /// `X` strictly above the offset. `false` means "cannot certify".
    pub fn disjoint_from(&self, a: &Polyhedron) -> Result<bool> {
        check_dim("polyhedron", self.dim(), a.dim())?;
        for (row, &r) in a.h.outer_iter().zip(a.r.iter()) {
            let neg = row.mapv(|v| -v);
            if -self.support(neg.view())? > r {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Exact inclusion test `X ⊆ G` for a polyhedron.
    pub fn contained_in(&self, g: &Polyhedron) -> Result<bool> {
        check_dim("polyhedron", self.dim(), g.dim())?;
        for (row, &r) in g.h.outer_iter().zip(g.r.iter()) {
            if self.support(row)? > r {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Splits `[-1, 1]` of symbol `id` into its two halves, substituting
    /// `0.5 + 0.5 s_j` and `-0.5 + 0.5 s_k` with fresh `j`, `k`.
    pub fn bisect_symbol(
        &self,
        id: SymbolId,
        provider: &SymbolProvider,
    ) -> Result<(SZonotope, SZonotope)> {
        let k = self.position(id).ok_or(Error::UnknownSymbol(id))?;
        let half = self.generators.column(k).mapv(|v| 0.5 * v);
        let fresh = provider.fresh_ids(2);
        let mut upper = self.clone();
        upper.center += &half;
        upper.generators.column_mut(k).assign(&half);
        upper.ids[k] = fresh[0];
        let mut lower = self.clone();
        lower.center -= &half;
        lower.generators.column_mut(k).assign(&half);
        lower.ids[k] = fresh[1];
        Ok((upper, lower))
    }

    /// Splits the generator matrix into the columns of `ids` (in that order,
    /// zero when absent) and the remaining columns.
    pub fn split_columns(&self, ids: &[SymbolId]) -> (Array2<f64>, Array2<f64>) {
        let wanted: HashMap<SymbolId, usize> =
            ids.iter().enumerate().map(|(k, &id)| (id, k)).collect();
        let mut selected = Array2::zeros((self.dim(), ids.len()));
        let mut rest = Vec::new();
        for (k, id) in self.ids.iter().enumerate() {
            match wanted.get(id) {
                Some(&dst) => selected.column_mut(dst).assign(&self.generators.column(k)),
                None => rest.push(k),
            }
        }
        (selected, self.generators.select(Axis(1), &rest))
    }

    /// Replaces every symbol by fresh independent ones covering the interval
    /// hull. Discards all dependency information.
    pub fn decorrelate(&self, provider: &SymbolProvider) -> SZonotope {
        let hull = self.interval_hull();
        let ids = provider.fresh_ids(self.dim());
        let mut g = Array2::zeros((self.dim(), self.dim()));
        for (i, iv) in hull.iter().enumerate() {
            g[[i, i]] = iv.rad();
        }
        Self {
            center: self.center.clone(),
            generators: g,
            ids,
        }
    }

    /// Evaluates at a valuation of the symbols; unlisted symbols take 0.
    pub fn eval(&self, valuation: &HashMap<SymbolId, f64>) -> Array1<f64> {
        let sigma: Array1<f64> = self
            .ids
            .iter()
            .map(|id| valuation.get(id).copied().unwrap_or(0.0))
            .collect();
        &self.center + &self.generators.dot(&sigma)
    }
}

/// Frobenius norm of a generator matrix.
pub fn f_radius(m: &Array2<f64>) -> f64 {
    m.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn ids(raw: &[u64]) -> Vec<SymbolId> {
        raw.iter().copied().map(SymbolId).collect()
    }

    fn z1(c: f64, g: &[f64], raw: &[u64]) -> SZonotope {
        SZonotope::new(
            array![c],
            Array2::from_shape_vec((1, g.len()), g.to_vec()).unwrap(),
            ids(raw),
        )
        .unwrap()
    }

    fn coeff(x: &SZonotope, id: u64) -> f64 {
        x.column(SymbolId(id)).map(|c| c[0]).unwrap_or(0.0)
    }

    #[test]
    fn duplicate_ids_are_merged() {
        let x = z1(0.0, &[1.0, 2.0, 3.0], &[4, 5, 4]);
        assert_eq!(x.ids(), &ids(&[4, 5])[..]);
        assert_eq!(coeff(&x, 4), 4.0);
    }

    #[test]
    fn linear_image_cases() {
        let x = z1(1.0, &[3.0], &[5]);
        assert_eq!(x.linear_image(&Array2::eye(1)).unwrap(), x);
        let y = x.linear_image(&array![[2.0]]).unwrap();
        assert_eq!(y, z1(2.0, &[6.0], &[5]));
        let z = x.linear_image(&array![[0.0]]).unwrap();
        assert_eq!(z, z1(0.0, &[0.0], &[5]));
        assert!(x.linear_image(&Array2::eye(2)).is_err());
    }

    #[test]
    fn add_cancels_shared_symbols() {
        let x = z1(0.0, &[1.0], &[1]);
        let y = z1(0.0, &[-1.0], &[1]);
        assert_eq!(x.add(&y).unwrap(), z1(0.0, &[0.0], &[1]));
        assert_eq!(x.add(&SZonotope::scalar(0.0)).unwrap(), x);
    }

    #[test]
    fn add_reproduces_successor_assembly() {
        let sin_part = z1(0.45, &[0.42, 0.03], &[1, 4]);
        let control = z1(0.1, &[0.2, -0.1, 0.0], &[1, 2, 3]);
        let dist = z1(0.0, &[0.1], &[5]);
        let next = sin_part.sub(&control).unwrap().add(&dist).unwrap();
        assert_abs_diff_eq!(next.center()[0], 0.35, epsilon = 1e-12);
        let expected = [(1, 0.22), (2, 0.1), (3, 0.0), (4, 0.03), (5, 0.1)];
        for (id, v) in expected {
            assert_abs_diff_eq!(coeff(&next, id), v, epsilon = 1e-12);
        }
        assert!(next.column(SymbolId(3)).is_some());
    }

    #[test]
    fn vcat_cases() {
        let shared = z1(1.0, &[1.0], &[1]).vcat(&z1(2.0, &[1.0], &[1]));
        assert_eq!(shared.center(), &array![1.0, 2.0]);
        assert_eq!(shared.generators(), &array![[1.0], [1.0]]);
        let disjoint = z1(1.0, &[1.0], &[1]).vcat(&z1(2.0, &[1.0], &[2]));
        assert_eq!(disjoint.generators(), &array![[1.0, 0.0], [0.0, 1.0]]);
        let with_point = z1(1.0, &[1.0], &[1]).vcat(&SZonotope::scalar(3.0));
        assert_eq!(with_point.generators(), &array![[1.0], [0.0]]);
        assert_eq!(with_point.center(), &array![1.0, 3.0]);
    }

    #[test]
    fn vcat_all_matches_pairwise() {
        let a = z1(1.0, &[1.0, 2.0], &[1, 2]);
        let b = z1(2.0, &[3.0], &[2]);
        let c = z1(3.0, &[4.0], &[7]);
        let all = SZonotope::vcat_all(&[a.clone(), b.clone(), c.clone()]);
        let pair = a.vcat(&b).vcat(&c);
        assert_eq!(all.center(), pair.center());
        for id in ids(&[1, 2, 7]) {
            assert_eq!(all.column(id), pair.column(id));
        }
        assert_eq!(all.num_symbols(), pair.num_symbols());
    }

    #[test]
    fn bounds_cases() {
        assert_eq!(
            z1(1.0, &[2.0, -1.0], &[1, 2]).bounds_1d().unwrap(),
            Interval { lo: -2.0, hi: 4.0 }
        );
        assert_eq!(
            z1(0.5, &[0.5], &[1]).bounds_1d().unwrap(),
            Interval { lo: 0.0, hi: 1.0 }
        );
        assert_eq!(
            SZonotope::scalar(2.5).bounds_1d().unwrap(),
            Interval::point(2.5)
        );
    }

    #[test]
    fn multiply_cases() {
        let p = SymbolProvider::starting_at(100);
        let sq = z1(0.0, &[1.0], &[1]).multiply(&z1(0.0, &[1.0], &[1]), &p).unwrap();
        assert_eq!(sq.center()[0], 0.5);
        assert_eq!(coeff(&sq, 1), 0.0);
        assert_eq!(sq.generators()[[0, 1]], 0.5);
        assert_eq!(sq.bounds_1d().unwrap(), Interval { lo: 0.0, hi: 1.0 });

        let prod = z1(1.0, &[1.0], &[1]).multiply(&z1(1.0, &[1.0], &[2]), &p).unwrap();
        assert_eq!(prod.center()[0], 1.0);
        assert_eq!((coeff(&prod, 1), coeff(&prod, 2)), (1.0, 1.0));
        assert_eq!(prod.generators()[[0, 2]], 1.0);
        assert_eq!(prod.bounds_1d().unwrap(), Interval { lo: -2.0, hi: 4.0 });

        let zero = z1(1.0, &[1.0], &[1]).multiply(&SZonotope::scalar(0.0), &p).unwrap();
        assert!(zero.center()[0] == 0.0 && zero.generators().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn reduce_identity_when_small() {
        let x = z1(0.0, &[1.0, 2.0], &[1, 2]);
        assert_eq!(x.reduce(2, &[], &SymbolProvider::new()).unwrap(), x);
    }

    #[test]
    fn reduce_drops_zero_columns_first() {
        let x = SZonotope::new(
            array![0.0, 0.0],
            array![[1.0, 0.0, 0.01], [0.0, 0.0, 0.01]],
            ids(&[1, 9, 2]),
        )
        .unwrap();
        let r = x.reduce(2, &[], &SymbolProvider::starting_at(50)).unwrap();
        assert_eq!(r.ids(), &ids(&[1, 2])[..]);
        assert_eq!(r.generators(), &array![[1.0, 0.01], [0.0, 0.01]]);
    }

    #[test]
    fn reduce_respects_protected_symbols() {
        let x = SZonotope::new(
            array![0.0, 0.0],
            array![[0.01, 1.0, 0.0, 0.02], [0.01, 0.0, 0.5, 0.0]],
            ids(&[7, 1, 3, 4]),
        )
        .unwrap();
        let p = SymbolProvider::starting_at(50);
        let r = x.reduce(3, &[SymbolId(7)], &p).unwrap();
        assert_eq!(r.ids(), &ids(&[7, 50, 51])[..]);
        assert_eq!(r.column(SymbolId(7)), x.column(SymbolId(7)));
        let err = x.reduce(3, &ids(&[7, 1]), &p);
        assert!(matches!(err, Err(Error::ReductionOrder { .. })));
        assert!(x.reduce(1, &[], &p).is_err());
    }

    #[test]
    fn reduce_to_one_kept_symbol() {
        let x = SZonotope::new(
            array![0.0, 0.0],
            array![[1.0, 0.01, 0.02, 0.0], [0.0, 0.01, 0.0, 0.005]],
            ids(&[1, 2, 3, 4]),
        )
        .unwrap();
        // q = 3 on 2 rows: one kept symbol plus a 2-symbol box
        let r = x.reduce(3, &[], &SymbolProvider::starting_at(50)).unwrap();
        assert_eq!(r.ids(), &ids(&[1, 50, 51])[..]);
        assert_eq!(r.generators(), &array![[1.0, 0.03, 0.0], [0.0, 0.0, 0.015]]);
    }

    #[test]
    fn support_cases() {
        let x = SZonotope::new(
            array![1.0, 2.0],
            array![[1.0, 0.0, 0.5], [0.0, 2.0, 0.1]],
            ids(&[1, 2, 3]),
        )
        .unwrap();
        assert_eq!(x.support(array![1.0, 0.0].view()).unwrap(), 2.5);
        assert_eq!(x.support(array![0.0, 0.0].view()).unwrap(), 0.0);
        let h = array![0.3, -0.7];
        let inf = -x.support(h.mapv(|v| -v).view()).unwrap();
        let hull_min: f64 = x.center().dot(&h)
            - h.dot(x.generators()).iter().map(|v| v.abs()).sum::<f64>();
        assert_abs_diff_eq!(inf, hull_min, epsilon = 1e-12);
    }

    fn unit_box(n: usize) -> SZonotope {
        let p = SymbolProvider::new();
        SZonotope::from_box(&vec![0.0; n], &vec![1.0; n], &p).unwrap()
    }

    #[test]
    fn disjointness_cases() {
        let x = unit_box(1);
        let below = Polyhedron::new(array![[1.0]], array![-1.0]).unwrap();
        assert!(x.disjoint_from(&below).unwrap());
        let overlap = Polyhedron::new(array![[1.0]], array![0.5]).unwrap();
        assert!(!x.disjoint_from(&overlap).unwrap());
        let diag = Polyhedron::new(array![[1.0, 1.0]], array![-0.1]).unwrap();
        assert!(unit_box(2).disjoint_from(&diag).unwrap());
        assert!(!x.disjoint_from(&Polyhedron::whole_space(1)).unwrap());
    }

    #[test]
    fn containment_cases() {
        let g = Polyhedron::from_box(&[-2.0, -2.0], &[2.0, 2.0]).unwrap();
        assert_eq!(g.num_constraints(), 4);
        assert!(unit_box(2).contained_in(&g).unwrap());
        let p = SymbolProvider::new();
        let wide = SZonotope::from_box(&[0.0, 0.0], &[3.0, 1.0], &p).unwrap();
        assert!(!wide.contained_in(&g).unwrap());
    }

    #[test]
    fn bisect_cases() {
        let p = SymbolProvider::starting_at(10);
        let x = z1(0.5, &[0.5], &[1]);
        let (a, b) = x.bisect_symbol(SymbolId(1), &p).unwrap();
        assert_eq!(a, z1(0.75, &[0.25], &[10]));
        assert_eq!(b, z1(0.25, &[0.25], &[11]));
        assert_eq!(a.bounds_1d().unwrap(), Interval { lo: 0.5, hi: 1.0 });
        assert_eq!(b.bounds_1d().unwrap(), Interval { lo: 0.0, hi: 0.5 });

        let flat = z1(1.0, &[0.0, 2.0], &[1, 2]);
        let (a, b) = flat.bisect_symbol(SymbolId(1), &p).unwrap();
        assert_eq!(a.interval_hull(), b.interval_hull());

        let two = SZonotope::new(array![0.0, 1.0], array![[1.0, 0.5], [2.0, 0.0]], ids(&[1, 2])).unwrap();
        let (a, _) = two.bisect_symbol(SymbolId(1), &p).unwrap();
        assert_eq!(a.column(SymbolId(2)), two.column(SymbolId(2)));
        assert!(x.bisect_symbol(SymbolId(99), &p).is_err());
    }

    #[test]
    fn f_radius_cases() {
        assert_eq!(f_radius(&Array2::zeros((2, 3))), 0.0);
        assert_abs_diff_eq!(f_radius(&Array2::eye(2)), 2f64.sqrt());
        assert_eq!(f_radius(&array![[3.0], [4.0]]), 5.0);
    }

    #[test]
    fn self_difference_is_exactly_zero() {
        let x = SZonotope::new(array![1.0, -2.0], array![[0.3, -1.2], [2.0, 0.7]], ids(&[3, 8])).unwrap();
        let d = x.add(&x.linear_image(&(-Array2::eye(2))).unwrap()).unwrap();
        assert!(d.generators().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn split_columns_separates_blocks() {
        let x = SZonotope::new(array![0.0, 0.0], array![[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]], ids(&[1, 2, 3])).unwrap();
        let (sel, rest) = x.split_columns(&ids(&[3, 9, 1]));
        assert_eq!(sel, array![[3.0, 0.0, 1.0], [6.0, 0.0, 4.0]]);
        assert_eq!(rest, array![[2.0], [5.0]]);
    }
}
