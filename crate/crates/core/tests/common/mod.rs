//! Independent brute-force oracle for the strip experiment.
//!
//! Works directly from the printed layout and raw index arithmetic, sharing no
//! code with the crate's measurement or enumeration paths.

#![allow(dead_code)]

/// Printed faces: first sequence, then the sign-reversed one.
const FACES: [&str; 2] = ["A+ B'+ A'- B-", "A- B'- A'+ B+"];

pub fn cell(i: i64) -> (String, i64) {
    let i = i.rem_euclid(8) as usize;
    let tok = FACES[i / 4].split(' ').nth(i % 4).unwrap();
    let (letter, sign) = tok.split_at(tok.len() - 1);
    (letter.to_string(), if sign == "+" { 1 } else { -1 })
}

/// Orientation as the cell-index step of one clockwise segment.
pub const STEPS: [i64; 2] = [-1, 1];

fn bob(front: i64, letter: &str) -> i64 {
    [front - 1, front + 1].into_iter().map(cell).find(|(l, _)| l == letter).unwrap().1
}

/// Exact CHSH sum and correlators for acceptance probabilities per side
/// (in f64 with integer-valued sums over 1/32 weights, so results are exact
/// for grid values of `p`). With `signalling`, rejections pick the best walk.
pub fn chsh(p_left: f64, p_right: f64, signalling: bool) -> (f64, [f64; 4], [f64; 4]) {
    let pairs = [("A", "B"), ("A'", "B"), ("A", "B'"), ("A'", "B'")];
    let mut num = [0.0; 4];
    let mut den = [0.0; 4];
    let mut mnum = [0.0; 4];
    let mut mden = [0.0; 4];
    let letters = ["A", "A'", "B", "B'"];
    for front in [0i64, 2, 4, 6] {
        for step in STEPS {
            for p in [p_left, p_right] {
                for bl in ["B", "B'"] {
                    let bv = bob(front, bl);
                    let mut branches = vec![(p, cell(front))];
                    let target = |al: &str| if (al, bl) == ("A'", "B'") { -1 } else { 1 };
                    if signalling {
                        let landing = [cell(front + 2), cell(front - 2)];
                        let best = landing.into_iter().find(|(l, v)| v * bv == target(l)).unwrap();
                        branches.push((1.0 - p, best));
                    } else {
                        branches.push((1.0 - p, cell(front + 2 * step)));
                    }
                    for (w, (al, av)) in branches {
                        let w = w / 32.0;
                        let k = pairs.iter().position(|(a, b)| *a == al && *b == bl).unwrap();
                        num[k] += w * (av * bv) as f64;
                        den[k] += w;
                        let ka = letters.iter().position(|l| *l == al).unwrap();
                        let kb = letters.iter().position(|l| *l == bl).unwrap();
                        mnum[ka] += w * av as f64;
                        mden[ka] += w;
                        mnum[kb] += w * bv as f64;
                        mden[kb] += w;
                    }
                }
            }
        }
    }
    let e: [f64; 4] = std::array::from_fn(|k| num[k] / den[k]);
    let m: [f64; 4] = std::array::from_fn(|k| mnum[k] / mden[k]);
    (e[0] + e[1] + e[2] - e[3], e, m)
}
