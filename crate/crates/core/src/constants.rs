//! Numerical constants of the inequalities checked by the harness, computed
//! from their closed forms.

use serde::Serialize;

use crate::scalar::Real;

/// `8√2`, improved Cheeger inequality.
pub fn improved_cheeger<T: Real>() -> T {
    T::lit(8.0) * T::SQRT_2()
}

/// `(16e/(e−1))²`, eigenvalue ratio bound.
pub fn ratio_bound<T: Real>() -> T {
    let e = T::E();
    let c = T::lit(16.0) * e / (e - T::one());
    c * c
}

/// `(e−1)/(√2·e)`, dimension-free Buser inequality.
pub fn buser_ledoux<T: Real>() -> T {
    let e = T::E();
    (e - T::one()) / (T::SQRT_2() * e)
}

/// `(e−1)²/(16√2·e²)`, higher-order Buser inequality (per `1/k`).
pub fn higher_buser_ledoux<T: Real>() -> T {
    let e = T::E();
    let d = e - T::one();
    d * d / (T::lit(16.0) * T::SQRT_2() * e * e)
}

/// `152`, dimension-free Cheng-type observable diameter bound.
pub fn dimension_free_cheng<T: Real>() -> T {
    T::lit(152.0)
}

/// `√(2n(n+4))`, classical Cheng diameter bound in dimension `n`.
pub fn classical_cheng<T: Real>(n: usize) -> T {
    let n = T::from_usize_lossy(n);
    (T::lit(2.0) * n * (n + T::lit(4.0))).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedConstant {
    pub name: &'static str,
    pub expression: &'static str,
    pub value: f64,
}

pub fn table() -> Vec<NamedConstant> {
    vec![
        NamedConstant { name: "improved_cheeger", expression: "8*sqrt(2)", value: improved_cheeger() },
        NamedConstant { name: "ratio_bound", expression: "(16e/(e-1))^2", value: ratio_bound() },
        NamedConstant { name: "buser_ledoux", expression: "(e-1)/(sqrt(2)e)", value: buser_ledoux() },
        NamedConstant {
            name: "higher_buser_ledoux",
            expression: "(e-1)^2/(16 sqrt(2) e^2)",
            value: higher_buser_ledoux(),
        },
        NamedConstant { name: "dimension_free_cheng", expression: "152", value: dimension_free_cheng() },
    ]
}
