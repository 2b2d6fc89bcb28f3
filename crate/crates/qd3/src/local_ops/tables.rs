//! Frozen sparsity tables for every closed-form local matrix.
//!
//! Each entry is `(row, col, sign, weight)` with 0-based indices in the
//! row-major tensor basis (left factor slowest). Weights are resolved by the
//! evaluators in [`super::weights`]. The tables are the normative content for
//! matrix construction; `tests::table_digests` pins them against accidental
//! edits.

/// Weights of the vector R-matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[allow(missing_docs)]
pub enum Vw {
    A,
    B,
    E,
    G,
    GBar,
    D,
    D1,
    D2,
    DBar,
    D1Bar,
    D2Bar,
    G1,
    G2,
    G3,
    G1Bar,
    G2Bar,
    G3Bar,
}

/// Weights of the fused R⁽±⁾ matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[allow(missing_docs)]
pub enum Fw {
    A1,
    B1,
    E1,
    E2,
    E3,
    E4,
}

/// Weights of the mixed fused R⁽⁺⁻⁾ matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[allow(missing_docs)]
pub enum Pw {
    R1,
    R2,
    R3,
    R4,
    R5,
    R3Bar,
    R4Bar,
    R5Bar,
}

/// Weights of the spinorial R-matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[allow(missing_docs)]
pub enum Sw {
    A2,
    B2,
    E5,
    E6,
}

/// Constants of the S transform.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[allow(missing_docs)]
pub enum Tw {
    S0,
    S1,
    S2,
    S3,
    S4,
    S5,
    S6,
    S7,
    S8,
    S9,
    S10,
    S11,
    S12,
}

/// One nonzero entry of a sparse table.
pub type Entry<W> = (u8, u8, i8, W);

/// Vector R-matrix on the 6⊗6 layout (36×36).
pub const R_VECTOR: [Entry<Vw>; 90] = [
    (0, 0, 1, Vw::A),
    (1, 1, 1, Vw::B),
    (1, 6, 1, Vw::G),
    (2, 2, 1, Vw::B),
    (2, 12, 1, Vw::G),
    (3, 3, 1, Vw::B),
    (3, 18, 1, Vw::G),
    (4, 4, 1, Vw::B),
    (4, 24, 1, Vw::G),
    (5, 5, 1, Vw::E),
    (5, 10, 1, Vw::D),
    (5, 15, 1, Vw::D1),
    (5, 20, 1, Vw::D1),
    (5, 25, 1, Vw::D2),
    (5, 30, 1, Vw::G1),
    (6, 1, 1, Vw::GBar),
    (6, 6, 1, Vw::B),
    (7, 7, 1, Vw::A),
    (8, 8, 1, Vw::B),
    (8, 13, 1, Vw::G),
    (9, 9, 1, Vw::B),
    (9, 19, 1, Vw::G),
    (10, 5, 1, Vw::DBar),
    (10, 10, 1, Vw::E),
    (10, 15, 1, Vw::D),
    (10, 20, 1, Vw::D),
    (10, 25, 1, Vw::G2),
    (10, 30, 1, Vw::D2),
    (11, 11, 1, Vw::B),
    (11, 31, 1, Vw::G),
    (12, 2, 1, Vw::GBar),
    (12, 12, 1, Vw::B),
    (13, 8, 1, Vw::GBar),
    (13, 13, 1, Vw::B),
    (14, 14, 1, Vw::A),
    (15, 5, 1, Vw::D1Bar),
    (15, 10, 1, Vw::DBar),
    (15, 15, 1, Vw::E),
    (15, 20, 1, Vw::G3),
    (15, 25, 1, Vw::D),
    (15, 30, 1, Vw::D1),
    (16, 16, 1, Vw::B),
    (16, 26, 1, Vw::G),
    (17, 17, 1, Vw::B),
    (17, 32, 1, Vw::G),
    (18, 3, 1, Vw::GBar),
    (18, 18, 1, Vw::B),
    (19, 9, 1, Vw::GBar),
    (19, 19, 1, Vw::B),
    (20, 5, 1, Vw::D1Bar),
    (20, 10, 1, Vw::DBar),
    (20, 15, 1, Vw::G3Bar),
    (20, 20, 1, Vw::E),
    (20, 25, 1, Vw::D),
    (20, 30, 1, Vw::D1),
    (21, 21, 1, Vw::A),
    (22, 22, 1, Vw::B),
    (22, 27, 1, Vw::G),
    (23, 23, 1, Vw::B),
    (23, 33, 1, Vw::G),
    (24, 4, 1, Vw::GBar),
    (24, 24, 1, Vw::B),
    (25, 5, 1, Vw::D2Bar),
    (25, 10, 1, Vw::G2Bar),
    (25, 15, 1, Vw::DBar),
    (25, 20, 1, Vw::DBar),
    (25, 25, 1, Vw::E),
    (25, 30, 1, Vw::D),
    (26, 16, 1, Vw::GBar),
    (26, 26, 1, Vw::B),
    (27, 22, 1, Vw::GBar),
    (27, 27, 1, Vw::B),
    (28, 28, 1, Vw::A),
    (29, 29, 1, Vw::B),
    (29, 34, 1, Vw::G),
    (30, 5, 1, Vw::G1Bar),
    (30, 10, 1, Vw::D2Bar),
    (30, 15, 1, Vw::D1Bar),
    (30, 20, 1, Vw::D1Bar),
    (30, 25, 1, Vw::DBar),
    (30, 30, 1, Vw::E),
    (31, 11, 1, Vw::GBar),
    (31, 31, 1, Vw::B),
    (32, 17, 1, Vw::GBar),
    (32, 32, 1, Vw::B),
    (33, 23, 1, Vw::GBar),
    (33, 33, 1, Vw::B),
    (34, 29, 1, Vw::GBar),
    (34, 34, 1, Vw::B),
    (35, 35, 1, Vw::A),
];

/// Fused R⁽⁺⁾ on the 4⊗6 layout (24×24).
pub const R_PLUS: [Entry<Fw>; 48] = [
    (0, 0, 1, Fw::A1),
    (1, 1, 1, Fw::A1),
    (2, 2, 1, Fw::A1),
    (3, 3, 1, Fw::B1),
    (3, 7, -1, Fw::E1),
    (3, 12, 1, Fw::E2),
    (4, 4, 1, Fw::B1),
    (4, 8, 1, Fw::E1),
    (4, 18, -1, Fw::E2),
    (5, 5, 1, Fw::B1),
    (5, 14, -1, Fw::E1),
    (5, 19, 1, Fw::E2),
    (6, 6, 1, Fw::A1),
    (7, 3, -1, Fw::E3),
    (7, 7, 1, Fw::B1),
    (7, 12, -1, Fw::E1),
    (8, 4, 1, Fw::E3),
    (8, 8, 1, Fw::B1),
    (8, 18, -1, Fw::E1),
    (9, 9, 1, Fw::A1),
    (10, 10, 1, Fw::A1),
    (11, 11, 1, Fw::B1),
    (11, 16, 1, Fw::E1),
    (11, 21, 1, Fw::E2),
    (12, 3, 1, Fw::E4),
    (12, 7, -1, Fw::E3),
    (12, 12, 1, Fw::B1),
    (13, 13, 1, Fw::A1),
    (14, 5, -1, Fw::E3),
    (14, 14, 1, Fw::B1),
    (14, 19, -1, Fw::E1),
    (15, 15, 1, Fw::A1),
    (16, 11, 1, Fw::E3),
    (16, 16, 1, Fw::B1),
    (16, 21, 1, Fw::E1),
    (17, 17, 1, Fw::A1),
    (18, 4, -1, Fw::E4),
    (18, 8, -1, Fw::E3),
    (18, 18, 1, Fw::B1),
    (19, 5, 1, Fw::E4),
    (19, 14, -1, Fw::E3),
    (19, 19, 1, Fw::B1),
    (20, 20, 1, Fw::A1),
    (21, 11, 1, Fw::E4),
    (21, 16, 1, Fw::E3),
    (21, 21, 1, Fw::B1),
    (22, 22, 1, Fw::A1),
    (23, 23, 1, Fw::A1),
];

/// Fused R⁽⁻⁾ on the 4⊗6 layout (24×24).
pub const R_MINUS: [Entry<Fw>; 48] = [
    (0, 0, 1, Fw::A1),
    (1, 1, 1, Fw::A1),
    (2, 2, 1, Fw::B1),
    (2, 7, 1, Fw::E1),
    (2, 12, 1, Fw::E2),
    (3, 3, 1, Fw::A1),
    (4, 4, 1, Fw::B1),
    (4, 9, -1, Fw::E1),
    (4, 18, -1, Fw::E2),
    (5, 5, 1, Fw::B1),
    (5, 15, -1, Fw::E1),
    (5, 19, 1, Fw::E2),
    (6, 6, 1, Fw::A1),
    (7, 2, 1, Fw::E3),
    (7, 7, 1, Fw::B1),
    (7, 12, 1, Fw::E1),
    (8, 8, 1, Fw::A1),
    (9, 4, -1, Fw::E3),
    (9, 9, 1, Fw::B1),
    (9, 18, 1, Fw::E1),
    (10, 10, 1, Fw::A1),
    (11, 11, 1, Fw::B1),
    (11, 16, -1, Fw::E1),
    (11, 20, -1, Fw::E2),
    (12, 2, 1, Fw::E4),
    (12, 7, 1, Fw::E3),
    (12, 12, 1, Fw::B1),
    (13, 13, 1, Fw::A1),
    (14, 14, 1, Fw::A1),
    (15, 5, -1, Fw::E3),
    (15, 15, 1, Fw::B1),
    (15, 19, -1, Fw::E1),
    (16, 11, -1, Fw::E3),
    (16, 16, 1, Fw::B1),
    (16, 20, 1, Fw::E1),
    (17, 17, 1, Fw::A1),
    (18, 4, -1, Fw::E4),
    (18, 9, 1, Fw::E3),
    (18, 18, 1, Fw::B1),
    (19, 5, 1, Fw::E4),
    (19, 15, -1, Fw::E3),
    (19, 19, 1, Fw::B1),
    (20, 11, -1, Fw::E4),
    (20, 16, 1, Fw::E3),
    (20, 20, 1, Fw::B1),
    (21, 21, 1, Fw::A1),
    (22, 22, 1, Fw::A1),
    (23, 23, 1, Fw::A1),
];

/// Mixed fused R⁽⁺⁻⁾ on the 4⊗4 layout (16×16).
pub const R_PM: [Entry<Pw>; 28] = [
    (0, 0, 1, Pw::R1),
    (1, 1, 1, Pw::R1),
    (2, 2, 1, Pw::R1),
    (3, 3, 1, Pw::R2),
    (3, 6, 1, Pw::R3),
    (3, 9, 1, Pw::R4),
    (3, 12, 1, Pw::R5),
    (4, 4, 1, Pw::R1),
    (5, 5, 1, Pw::R1),
    (6, 3, 1, Pw::R3Bar),
    (6, 6, 1, Pw::R2),
    (6, 9, -1, Pw::R3),
    (6, 12, -1, Pw::R4),
    (7, 7, 1, Pw::R1),
    (8, 8, 1, Pw::R1),
    (9, 3, 1, Pw::R4Bar),
    (9, 6, -1, Pw::R3Bar),
    (9, 9, 1, Pw::R2),
    (9, 12, -1, Pw::R3),
    (10, 10, 1, Pw::R1),
    (11, 11, 1, Pw::R1),
    (12, 3, 1, Pw::R5Bar),
    (12, 6, -1, Pw::R4Bar),
    (12, 9, -1, Pw::R3Bar),
    (12, 12, 1, Pw::R2),
    (13, 13, 1, Pw::R1),
    (14, 14, 1, Pw::R1),
    (15, 15, 1, Pw::R1),
];

/// Spinorial R̃ on the 4⊗4 layout (16×16).
pub const R_SPIN: [Entry<Sw>; 28] = [
    (0, 0, 1, Sw::A2),
    (1, 1, 1, Sw::B2),
    (1, 4, 1, Sw::E5),
    (2, 2, 1, Sw::B2),
    (2, 8, 1, Sw::E5),
    (3, 3, 1, Sw::B2),
    (3, 12, 1, Sw::E5),
    (4, 1, 1, Sw::E6),
    (4, 4, 1, Sw::B2),
    (5, 5, 1, Sw::A2),
    (6, 6, 1, Sw::B2),
    (6, 9, 1, Sw::E5),
    (7, 7, 1, Sw::B2),
    (7, 13, 1, Sw::E5),
    (8, 2, 1, Sw::E6),
    (8, 8, 1, Sw::B2),
    (9, 6, 1, Sw::E6),
    (9, 9, 1, Sw::B2),
    (10, 10, 1, Sw::A2),
    (11, 11, 1, Sw::B2),
    (11, 14, 1, Sw::E5),
    (12, 3, 1, Sw::E6),
    (12, 12, 1, Sw::B2),
    (13, 7, 1, Sw::E6),
    (13, 13, 1, Sw::B2),
    (14, 11, 1, Sw::E6),
    (14, 14, 1, Sw::B2),
    (15, 15, 1, Sw::A2),
];

/// Similarity transform S on the 4⊗4 layout (16×16).
pub const S_TRANSFORM: [Entry<Tw>; 26] = [
    (0, 0, 1, Tw::S0),
    (1, 1, -1, Tw::S0),
    (2, 4, 1, Tw::S0),
    (3, 5, 1, Tw::S0),
    (4, 3, 1, Tw::S1),
    (4, 6, 1, Tw::S2),
    (4, 9, 1, Tw::S3),
    (4, 12, 1, Tw::S4),
    (5, 2, 1, Tw::S0),
    (6, 8, 1, Tw::S0),
    (7, 3, 1, Tw::S5),
    (7, 6, 1, Tw::S6),
    (7, 9, -1, Tw::S5),
    (7, 12, 1, Tw::S6),
    (8, 10, 1, Tw::S0),
    (9, 3, 1, Tw::S7),
    (9, 6, 1, Tw::S8),
    (9, 9, 1, Tw::S9),
    (9, 12, 1, Tw::S10),
    (10, 13, 1, Tw::S0),
    (11, 14, 1, Tw::S0),
    (12, 3, 1, Tw::S11),
    (12, 12, 1, Tw::S12),
    (13, 7, -1, Tw::S0),
    (14, 11, 1, Tw::S0),
    (15, 15, -1, Tw::S0),
];
