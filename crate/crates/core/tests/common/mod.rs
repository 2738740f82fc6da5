//! Shared test data: transcribed printed tables and small helpers.
#![allow(dead_code)]

use std::io::Write;
use std::path::PathBuf;

use siegel_restrict::exactfield::{cyc, CycNum};
use siegel_restrict::quadform::{IndexForm, SendingMatrix};
use siegel_restrict::restrict::LinForm;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn schema(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schemas").join(name)
}

pub fn f(a: i64, b: i64, c: i64) -> IndexForm {
    IndexForm::new(a, b, c).unwrap()
}

pub fn sm(s1: i64, s2: i64, s4: i64) -> SendingMatrix {
    SendingMatrix::new(s1, s2, s4).unwrap()
}

/// Form given by its three digits, e.g. 212 -> [2^1 2], 636 -> [6^3 6].
fn digits(code: u32) -> IndexForm {
    f((code / 100) as i64, ((code / 10) % 10) as i64, (code % 10) as i64)
}

/// Integer linear form from (coefficient, three-digit form) pairs.
pub fn lin(terms: &[(i64, u32)]) -> LinForm {
    LinForm::from_terms(terms.iter().map(|&(k, code)| (digits(code), CycNum::from_int(1, k))))
}

/// Linear form over Q(zeta6) from (const, zeta coefficient, form) triples.
pub fn lin6(terms: &[(i64, i64, u32)]) -> LinForm {
    LinForm::from_terms(terms.iter().map(|&(a, b, code)| (digits(code), cyc(6, &[a, b]))))
}

/// Writes a criterion line straight to stderr so it shows even for passing tests.
pub fn report(id: &str, pass: bool, title: &str, detail: &str) {
    let mut e = std::io::stderr().lock();
    let tag = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(e, "[{tag}] {id}: {title}");
    for line in detail.lines() {
        let _ = writeln!(e, "       {line}");
    }
}

pub type Printed = &'static [(u32, &'static [(i64, u32)])];

/// Level 9, s = I, q^2..q^5 as printed.
pub const L9_IDENTITY: Printed = &[
    (2, &[(2, 212), (1, 202)]),
    (3, &[(4, 202), (4, 214), (2, 204)]),
    (4, &[(1, 212), (2, 214), (4, 204), (2, 424), (4, 216), (2, 414), (1, 404), (2, 206)]),
    (5, &[(4, 214), (4, 204), (4, 414), (4, 426), (4, 206)]),
];

/// Level 9, s = diag(1,2), q^3..q^5 as printed.
pub const L9_DIAG12: Printed = &[
    (3, &[(2, 212), (1, 202)]),
    (4, &[(2, 202), (2, 214), (1, 204)]),
    (5, &[(2, 212), (2, 202), (2, 214), (3, 204), (2, 216), (1, 206)]),
];

/// Level 13, s = I, q^2..q^6 as printed.
pub const L13_IDENTITY: Printed = &[
    (2, &[(1, 202), (2, 212)]),
    (3, &[(4, 202), (2, 204), (4, 214)]),
    (4, &[(4, 204), (2, 206), (4, 212), (2, 214), (4, 216), (1, 404), (2, 414), (2, 424)]),
    (5, &[(4, 204), (4, 206), (4, 214), (4, 218), (4, 414), (4, 416), (4, 426)]),
    (6, &[(4, 202), (4, 214), (6, 216), (4, 404), (4, 416), (2, 426), (2, 636)]),
];

/// Level 13, s = diag(1,2), first printed variant (search-program output).
pub const L13_DIAG12_A: Printed = &[
    (3, &[(1, 202), (2, 212)]),
    (4, &[(2, 202), (1, 204), (2, 214)]),
    (5, &[(2, 202), (3, 204), (1, 206), (2, 212), (2, 214), (2, 216)]),
    (6, &[(2, 206), (4, 214), (2, 218), (1, 404), (2, 414), (2, 424)]),
    (7, &[(2, 202), (4, 204), (1, 206), (2, 212), (4, 216), (2, 414), (2, 416), (2, 426)]),
    (8, &[(2, 204), (2, 214), (2, 404), (2, 414), (4, 416), (2, 426)]),
    (9, &[(2, 202), (2, 206), (2, 214), (2, 216), (2, 218), (2, 414), (2, 426), (2, 636)]),
];

/// Level 13, s = diag(1,2), second printed variant (inside the W_2 display).
pub const L13_DIAG12_B: Printed = &[
    (3, &[(1, 202), (2, 212)]),
    (4, &[(2, 202), (1, 204), (2, 214)]),
    (5, &[(2, 202), (3, 204), (1, 206), (2, 212), (2, 214), (2, 216)]),
    (6, &[(2, 206), (4, 214), (1, 404), (2, 414)]),
    (7, &[(2, 202), (4, 204), (1, 206), (2, 212), (4, 216), (2, 414), (2, 416), (2, 426)]),
    (8, &[(2, 204), (2, 212), (2, 214), (2, 404), (2, 414), (4, 426)]),
    (9, &[(2, 202), (2, 206), (2, 214), (2, 216), (2, 218), (2, 414), (2, 426), (2, 636)]),
];

/// Level 13, s = [[2,1],[1,2]], q^3..q^12 as printed.
pub const L13_S212: Printed = &[
    (3, &[(1, 212)]),
    (4, &[(2, 202)]),
    (5, &[(3, 212), (3, 214)]),
    (6, &[(6, 204), (1, 424)]),
    (7, &[(6, 214), (3, 216), (3, 414)]),
    (8, &[(6, 202), (6, 206), (3, 404), (3, 426)]),
    (9, &[(6, 216), (3, 218), (3, 414), (6, 416), (1, 636)]),
    (10, &[(2, 204), (1, 424)]),
    (11, &[(2, 212), (1, 214), (2, 218), (2, 416)]),
    (12, &[(2, 206), (2, 426)]),
];

/// The ten printed level-13 equations.
pub fn l13_printed_equations() -> Vec<LinForm> {
    let mut rows: Vec<LinForm> = L13_DIAG12_A.iter().map(|(_, t)| lin(t)).collect();
    rows.push(lin6(&[
        (9, -9, 202),
        (2, -2, 204),
        (2, 0, 206),
        (4, -2, 212),
        (10, -6, 214),
        (4, 0, 216),
        (1, 0, 404),
        (2, 0, 414),
        (2, 0, 424),
    ]));
    rows.push(lin6(&[
        (0, 16, 202),
        (4, 6, 204),
        (4, 0, 206),
        (0, 8, 212),
        (4, 12, 214),
        (4, 0, 218),
        (4, 0, 414),
        (4, 0, 416),
        (4, 0, 426),
    ]));
    rows.push(lin6(&[
        (0, 4, 202),
        (-4, 4, 204),
        (8, -8, 212),
        (-4, 8, 214),
        (6, 0, 216),
        (4, 0, 404),
        (4, 0, 416),
        (2, 0, 426),
        (2, 0, 636),
    ]));
    rows
}

/// Printed level-9 equations E1..E4 (basis comparison) and F1..F3 (W_2).
pub fn l9_printed_e() -> Vec<LinForm> {
    L9_IDENTITY.iter().map(|(_, t)| lin(t)).collect()
}

pub fn l9_printed_f() -> Vec<LinForm> {
    L9_DIAG12.iter().map(|(_, t)| lin(t)).collect()
}

/// Twenty entries of the printed level-43 list, read from unambiguous positions.
pub const L43_SPOT: [(i64, i64, i64); 20] = [
    (2, 0, 2),
    (2, 0, 4),
    (2, 1, 6),
    (2, 1, 26),
    (4, 0, 4),
    (4, 0, 24),
    (4, 2, 26),
    (6, 0, 6),
    (6, 3, 24),
    (8, 0, 8),
    (8, 4, 24),
    (10, 0, 10),
    (10, 5, 22),
    (12, 0, 12),
    (12, 6, 22),
    (14, 0, 14),
    (14, 7, 20),
    (16, 4, 16),
    (16, 8, 20),
    (18, 9, 18),
];

/// Rows equal up to a nonzero scalar.
pub fn proportional(x: &LinForm, y: &LinForm) -> bool {
    let Some((t, cx)) = x.terms().next() else {
        return y.is_zero();
    };
    let Some(cy) = y.coeff(t) else {
        return false;
    };
    let r = cy.div(cx).unwrap();
    x.scale(&r) == *y
}
