//! The explicit matrices shipped as regression anchors, in EMatrix JSON form.

use crate::emod::EMatrix;

pub const B1_F5: &str = include_str!("../fixtures/b1_f5.json");
pub const B1_F3: &str = include_str!("../fixtures/b1_f3.json");
pub const B1_CONE_F5: &str = include_str!("../fixtures/b1_cone_f5.json");
pub const B2_F5: &str = include_str!("../fixtures/b2_f5.json");
pub const B_F5: &str = include_str!("../fixtures/b_f5.json");
pub const A1_I_F5: &str = include_str!("../fixtures/a1_i_f5.json");
pub const A1_II_F5: &str = include_str!("../fixtures/a1_ii_f5.json");
pub const A1_III_F5: &str = include_str!("../fixtures/a1_iii_f5.json");
pub const A1_IV_F5: &str = include_str!("../fixtures/a1_iv_f5.json");
pub const A1_F3: &str = include_str!("../fixtures/a1_f3.json");

/// The four linear matrices over F_5, in the listed order (i)-(iv).
pub const A1_F5_LIST: [(&str, &str); 4] =
    [("i", A1_I_F5), ("ii", A1_II_F5), ("iii", A1_III_F5), ("iv", A1_IV_F5)];

/// Parse a shipped fixture; the files are compiled in, so failure is a bug.
pub fn load(s: &str) -> EMatrix {
    EMatrix::from_json_str(s).expect("shipped fixture parses")
}

/// `B = (B_2 | B_1)` over F_5.
pub fn b_f5() -> EMatrix {
    load(B_F5)
}

pub fn b1_f5() -> EMatrix {
    load(B1_F5)
}

pub fn b1_f3() -> EMatrix {
    load(B1_F3)
}
