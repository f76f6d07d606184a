//! Fixed class labels.
//!
//! `E7_P7` lists `(i, j, word)` for the class `g_{i,j}` of `E7/P7`. A word
//! `a_1,…,a_k` (1-based node numbers) names the minimal coset
//! representative `v = s_{a_k}⋯s_{a_1}`, whose class has codimension
//! `27 − k`.

pub const E7_P7: &[(usize, usize, &str)] = &[
    (0, 1, "7,6,5,4,3,2,4,5,6,7,1,3,4,5,6,2,4,5,3,4,1,3,2,4,5,6,7"),
    (1, 1, "7,6,5,4,3,2,4,5,6,7,1,3,4,5,6,2,4,5,3,4,1,3,2,4,5,6"),
    (2, 1, "7,6,5,4,3,2,4,5,6,7,1,3,4,5,6,2,4,5,3,4,1,3,2,4,5"),
    (3, 1, "7,6,5,4,3,2,4,5,6,7,1,3,4,5,6,2,4,5,3,4,1,3,2,4"),
    (4, 1, "7,6,5,4,3,2,4,5,6,7,1,3,4,5,6,2,4,5,3,4,1,3,2"),
    (5, 1, "7,6,5,4,3,2,4,5,6,7,1,3,4,5,6,2,4,5,3,4,1,3"),
    (5, 2, "7,6,5,4,3,2,4,5,6,7,1,3,4,5,6,2,4,5,3,4,2,1"),
    (6, 1, "7,6,5,4,3,2,4,5,6,7,1,3,4,5,6,2,4,5,3,4,2"),
    (6, 2, "7,6,5,4,3,2,4,5,6,7,1,3,4,5,6,2,4,5,3,4,1"),
    (7, 1, "7,6,5,4,3,2,4,5,6,7,1,3,4,5,6,2,4,5,3,4"),
    (7, 2, "7,6,5,4,3,2,4,5,6,7,1,3,4,5,6,2,4,5,3,1"),
    (8, 1, "7,6,5,4,3,2,4,5,6,7,1,3,4,5,6,2,4,5,3"),
    (8, 2, "7,6,5,4,3,2,4,5,6,7,1,3,4,5,6,2,4,3,1"),
    (9, 1, "7,6,5,4,3,2,4,5,6,7,1,3,4,5,6,2,4,5"),
    (9, 2, "7,6,5,4,3,2,4,5,6,7,1,3,4,5,6,2,4,3"),
    (9, 3, "7,6,5,4,3,2,4,5,6,7,1,3,4,5,2,4,3,1"),
    (10, 1, "7,6,5,4,3,2,4,5,6,7,1,3,4,5,6,2,4"),
    (10, 2, "7,6,5,4,3,2,4,5,6,7,1,3,4,5,2,4,3"),
    (10, 3, "7,6,5,4,3,2,4,5,6,1,3,4,5,2,4,3,1"),
    (11, 1, "7,6,5,4,3,2,4,5,6,7,1,3,4,5,6,2"),
    (11, 2, "7,6,5,4,3,2,4,5,6,7,1,3,4,5,2,4"),
    (11, 3, "7,6,5,4,3,2,4,5,6,1,3,4,5,2,4,3"),
    (12, 1, "7,6,5,4,3,2,4,5,6,7,1,3,4,5,6"),
    (12, 2, "7,6,5,4,3,2,4,5,6,7,1,3,4,5,2"),
    (12, 3, "7,6,5,4,3,2,4,5,6,1,3,4,5,2,4"),
    (13, 1, "7,6,5,4,3,2,4,5,6,7,1,3,4,5"),
    (13, 2, "7,6,5,4,3,2,4,5,6,7,1,3,4,2"),
    (13, 3, "7,6,5,4,3,2,4,5,6,1,3,4,5,2"),
    (14, 1, "7,6,5,4,3,2,4,5,6,1,3,4,2"),
    (14, 2, "7,6,5,4,3,2,4,5,6,1,3,4,5"),
    (14, 3, "7,6,5,4,3,2,4,5,6,7,1,3,4"),
    (15, 1, "7,6,5,4,3,2,4,5,1,3,4,2"),
    (15, 2, "7,6,5,4,3,2,4,5,6,1,3,4"),
    (15, 3, "7,6,5,4,3,2,4,5,6,7,1,3"),
    (16, 1, "7,6,5,4,3,2,4,5,1,3,4"),
    (16, 2, "7,6,5,4,3,2,4,5,6,1,3"),
    (16, 3, "7,6,5,4,3,2,4,5,6,7,1"),
    (17, 1, "7,6,5,4,3,2,4,5,1,3"),
    (17, 2, "7,6,5,4,3,2,4,5,6,1"),
    (17, 3, "7,6,5,4,3,2,4,5,6,7"),
    (18, 1, "7,6,5,4,3,2,4,1,3"),
    (18, 2, "7,6,5,4,3,2,4,5,1"),
    (18, 3, "7,6,5,4,3,2,4,5,6"),
    (19, 1, "7,6,5,4,3,2,4,1"),
    (19, 2, "7,6,5,4,3,2,4,5"),
    (20, 1, "7,6,5,4,3,2,1"),
    (20, 2, "7,6,5,4,3,2,4"),
    (21, 1, "7,6,5,4,3,1"),
    (21, 2, "7,6,5,4,3,2"),
    (22, 1, "7,6,5,4,2"),
    (22, 2, "7,6,5,4,3"),
    (23, 1, "7,6,5,4"),
    (24, 1, "7,6,5"),
    (25, 1, "7,6"),
    (26, 1, "7"),
    (27, 1, ""),
];
