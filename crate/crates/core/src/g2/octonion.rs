use std::ops::{Add, Mul, Neg, Sub};

use crate::exterior::{Blade, KForm, NumForm};

/// Oriented lines of the multiplication table: `e_a ∘ e_b = e_c` for each
/// `(a, b, c)` and its cyclic shifts, negated when reversed. Read off the
/// associative form so that `φ(e_a, e_b, e_c) = ⟨e_a × e_b, e_c⟩ = +1`.
pub const FANO_TRIPLES: [[u8; 3]; 7] = [
    [4, 5, 6],
    [6, 2, 1],
    [1, 7, 4],
    [5, 2, 7],
    [6, 3, 7],
    [1, 3, 5],
    [4, 3, 2],
];

/// `(sign, index)` of `e_i ∘ e_j` for `i, j` in `0..8`, with `e_0 = 1`.
const fn build_table() -> [[(i8, u8); 8]; 8] {
    let mut table = [[(0i8, 0u8); 8]; 8];
    let mut i = 0;
    while i < 8 {
        table[0][i] = (1, i as u8);
        table[i][0] = (1, i as u8);
        if i > 0 {
            table[i][i] = (-1, 0);
        }
        i += 1;
    }
    let mut k = 0;
    while k < 7 {
        let [a, b, c] = FANO_TRIPLES[k];
        let (a, b, c) = (a as usize, b as usize, c as usize);
        table[a][b] = (1, c as u8);
        table[b][c] = (1, a as u8);
        table[c][a] = (1, b as u8);
        table[b][a] = (-1, c as u8);
        table[c][b] = (-1, a as u8);
        table[a][c] = (-1, b as u8);
        k += 1;
    }
    table
}

const TABLE: [[(i8, u8); 8]; 8] = build_table();

/// An octonion `x_0 + x_1 e_1 + … + x_7 e_7`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Octonion(pub [f64; 8]);

impl Octonion {
    pub const ONE: Octonion = Octonion([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);

    /// Imaginary unit `e_i`, `i` in 1..=7.
    pub fn unit(i: usize) -> Octonion {
        assert!((1..=7).contains(&i), "imaginary unit index {i} outside 1..=7");
        let mut v = [0.0; 8];
        v[i] = 1.0;
        Octonion(v)
    }

    pub fn from_imaginary(im: ImOctonion) -> Octonion {
        let mut v = [0.0; 8];
        v[1..].copy_from_slice(&im.0);
        Octonion(v)
    }

    pub fn re(&self) -> f64 {
        self.0[0]
    }

    pub fn im(&self) -> ImOctonion {
        let mut v = [0.0; 7];
        v.copy_from_slice(&self.0[1..]);
        ImOctonion(v)
    }

    pub fn conj(&self) -> Octonion {
        let mut v = self.0.map(|x| -x);
        v[0] = self.0[0];
        Octonion(v)
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

impl Mul for Octonion {
    type Output = Octonion;
    fn mul(self, rhs: Octonion) -> Octonion {
        let mut out = [0.0; 8];
        for (i, &x) in self.0.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for (j, &y) in rhs.0.iter().enumerate() {
                let (s, k) = TABLE[i][j];
                out[k as usize] += f64::from(s) * x * y;
            }
        }
        Octonion(out)
    }
}

impl Add for Octonion {
    type Output = Octonion;
    fn add(self, rhs: Octonion) -> Octonion {
        Octonion(std::array::from_fn(|i| self.0[i] + rhs.0[i]))
    }
}

impl Sub for Octonion {
    type Output = Octonion;
    fn sub(self, rhs: Octonion) -> Octonion {
        Octonion(std::array::from_fn(|i| self.0[i] - rhs.0[i]))
    }
}

impl Neg for Octonion {
    type Output = Octonion;
    fn neg(self) -> Octonion {
        Octonion(self.0.map(|x| -x))
    }
}

/// Imaginary octonion, identified with a vector of ℝ⁷.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ImOctonion(pub [f64; 7]);

impl ImOctonion {
    pub fn unit(i: usize) -> ImOctonion {
        Octonion::unit(i).im()
    }

    /// `⟨u, v⟩ = −Re(u ∘ v)`.
    pub fn inner(&self, other: &ImOctonion) -> f64 {
        -(Octonion::from_imaginary(*self) * Octonion::from_imaginary(*other)).re()
    }

    /// `u × v = Im(u ∘ v)`.
    pub fn cross(&self, other: &ImOctonion) -> ImOctonion {
        (Octonion::from_imaginary(*self) * Octonion::from_imaginary(*other)).im()
    }
}

/// `φ(u, v, w) = ⟨u × v, w⟩`.
pub fn phi(u: &ImOctonion, v: &ImOctonion, w: &ImOctonion) -> f64 {
    u.cross(v).inner(w)
}

/// The associative 3-form computed from the octonion product.
pub fn associative_form() -> KForm {
    let mut form = NumForm::zero(3);
    for blade in Blade::all_of_degree(3) {
        let idx: Vec<usize> = blade.indices().map(usize::from).collect();
        let value = phi(
            &ImOctonion::unit(idx[0]),
            &ImOctonion::unit(idx[1]),
            &ImOctonion::unit(idx[2]),
        );
        form.add_term(blade, value);
    }
    KForm::from_integer_form(&form).expect("structure constants are integers")
}

/// `e^{456} + e^{621} + e^{174} + e^{527} + e^{637} + e^{135} + e^{432}` built
/// term by term from the written index order.
pub fn listed_associative_form() -> NumForm {
    FANO_TRIPLES
        .iter()
        .map(|t| NumForm::monomial(t, 1.0).expect("valid indices"))
        .fold(NumForm::zero(3), |acc, m| acc.plus(&m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_and_squares() {
        let e1 = Octonion::unit(1);
        assert_eq!(Octonion::ONE * e1, e1);
        assert_eq!(e1 * Octonion::ONE, e1);
        let e3 = Octonion::unit(3);
        assert_eq!(e3 * e3, -Octonion::ONE);
    }

    #[test]
    fn e4_e5_is_e6() {
        assert_eq!(Octonion::unit(4) * Octonion::unit(5), Octonion::unit(6));
        assert_eq!(Octonion::unit(5) * Octonion::unit(4), -Octonion::unit(6));
        assert_eq!(
            ImOctonion::unit(4).cross(&ImOctonion::unit(5)),
            ImOctonion::unit(6)
        );
    }

    #[test]
    fn inner_is_euclidean() {
        for i in 1..=7 {
            for j in 1..=7 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert_eq!(ImOctonion::unit(i).inner(&ImOctonion::unit(j)), expected);
            }
        }
    }

    #[test]
    fn cross_is_antisymmetric_and_orthogonal() {
        let u = ImOctonion([0.3, -1.0, 2.0, 0.5, 0.0, 1.5, -0.7]);
        let v = ImOctonion([1.1, 0.4, -0.2, 0.9, 2.0, -1.0, 0.3]);
        let uv = u.cross(&v);
        let vu = v.cross(&u);
        for k in 0..7 {
            assert!((uv.0[k] + vu.0[k]).abs() < 1e-14);
        }
        assert!(uv.inner(&u).abs() < 1e-12);
        assert!(uv.inner(&v).abs() < 1e-12);
        assert!(u.cross(&u).0.iter().all(|x| x.abs() < 1e-15));
    }

    #[test]
    fn table_rows_are_signed_permutations() {
        for row in TABLE.iter() {
            let mut seen = [false; 8];
            for &(s, k) in row {
                assert!(s == 1 || s == -1);
                seen[k as usize] = true;
            }
            assert!(seen.iter().all(|&b| b));
        }
    }

    #[test]
    fn associative_form_coefficients() {
        let phi = associative_form();
        let c = |idx: &[u8]| phi.coefficient(idx).unwrap().as_const().unwrap();
        assert_eq!(c(&[4, 5, 6]), 1.into());
        assert_eq!(c(&[6, 2, 1]), 1.into());
        assert_eq!(c(&[1, 2, 6]), (-1).into());
        assert_eq!(c(&[1, 2, 7]), 0.into());
        assert_eq!(phi.len(), 7);
    }
}
