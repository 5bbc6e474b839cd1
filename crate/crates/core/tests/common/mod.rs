#![allow(dead_code)]

use std::io::Write;

use g2cone::exterior::{Blade, CoeffExpr, Field, KForm, NumForm, PointJet};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Writes past the test harness capture so the line shows in plain `cargo test` output.
pub fn report(id: u32, name: &str, pass: bool, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "acceptance {id} ({name}): {status}: {detail}");
    let _ = out.flush();
}

pub fn random_blade(rng: &mut ChaCha8Rng, degree: u8) -> Blade {
    let blades = Blade::all_of_degree(degree);
    blades[rng.gen_range(0..blades.len())]
}

pub fn random_numform(rng: &mut ChaCha8Rng, degree: u8, terms: usize) -> NumForm {
    let mut form = NumForm::zero(degree);
    for _ in 0..terms {
        form.add_term(random_blade(rng, degree), rng.gen_range(-2.0..2.0));
    }
    form
}

/// Coefficient built from A, B, their first partials and small integers.
pub fn random_coefficient(rng: &mut ChaCha8Rng) -> CoeffExpr {
    let atoms = [
        CoeffExpr::a(),
        CoeffExpr::b(),
        CoeffExpr::partial(Field::A, 1, 0),
        CoeffExpr::partial(Field::B, 0, 1),
    ];
    let mut c = CoeffExpr::int(rng.gen_range(-3..=3i64).max(1));
    for _ in 0..rng.gen_range(1..=3) {
        let atom = atoms[rng.gen_range(0..atoms.len())].clone();
        c = match rng.gen_range(0..4) {
            0 => c * atom,
            1 => c + atom,
            2 => c * atom.powi(2),
            _ => c / CoeffExpr::b(),
        };
    }
    c
}

pub fn random_kform(rng: &mut ChaCha8Rng, degree: u8, terms: usize) -> KForm {
    let mut form = KForm::zero(degree);
    for _ in 0..terms {
        form.add_term(random_blade(rng, degree), random_coefficient(rng));
    }
    form
}

pub fn random_jet(rng: &mut ChaCha8Rng) -> PointJet {
    PointJet::new(rng.gen_range(0.1..10.0), rng.gen_range(0.1..10.0))
        .with_r_derivatives(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        .with_t_derivatives(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}
