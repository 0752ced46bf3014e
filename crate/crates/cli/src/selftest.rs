//! A fast pass over the invariant corpus, one line per suite.

use csc::classify::Tag;
use csc::coding::{decode_finset, encode_finset, pair, unpair};
use csc::encodings::{decode_sigma2_solution, encode_poset, encode_sigma2, OrderSpec, Theta};
use csc::families::{CofiniteSingles, FinalSegments, Indiscrete, InitialSegments, LimitPoint, Singletons};
use csc::forcing::{check_structural, structural_cases, table_corpus};
use csc::functional::FunctionalTable;
use csc::gs::{closure_relation, gs_pipeline, gst1_extract, hausdorff_discrete, solve_rt22, Coloring, ExtractParams};
use csc::{make_generated_space, Space};
use csc::priority::{check_disjoint, init_construction, run_stages, verify_requirements};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Suite = fn(&mut ChaCha8Rng) -> Result<String, String>;

fn coding(_: &mut ChaCha8Rng) -> Result<String, String> {
    for z in 0..1u64 << 12 {
        let (x, y) = unpair(z);
        if pair(x, y) != z {
            return Err(format!("pairing breaks at {z}"));
        }
        let items: Vec<u64> = (0..12).filter(|i| z >> i & 1 == 1).collect();
        if decode_finset(&encode_finset(items.clone())) != items {
            return Err(format!("finite-set code breaks at {z}"));
        }
    }
    Ok("codes below 4096".into())
}

fn ginsburg_sands(_: &mut ChaCha8Rng) -> Result<String, String> {
    let cases = [
        (make_generated_space(Indiscrete), Tag::Indiscrete),
        (make_generated_space(InitialSegments), Tag::InitialSegment),
        (make_generated_space(FinalSegments), Tag::FinalSegment),
        (make_generated_space(Singletons), Tag::Discrete),
        (make_generated_space(CofiniteSingles), Tag::Cofinite),
    ];
    for (s, want) in cases {
        let c = gs_pipeline(&s, &ExtractParams::new(32, 32, 10)).map_err(|e| e.to_string())?;
        if c.tag != want || !c.passed() {
            return Err(format!("{} gave {}", s.rule(), c.tag));
        }
    }
    Ok("five outcomes verified".into())
}

fn rt22(rng: &mut ChaCha8Rng) -> Result<String, String> {
    for _ in 0..500 {
        let n = rng.gen_range(2..=8usize);
        let bits: u64 = rng.gen();
        let c = Coloring::new(n, |x, y| (bits >> (x.min(y) * 8 + x.max(y)) & 1) as u8);
        let best = (0u32..1 << n)
            .filter(|&m| {
                let pts: Vec<usize> = (0..n).filter(|&i| m >> i & 1 == 1).collect();
                [0u8, 1].iter().any(|&col| pts.iter().enumerate().all(|(a, &p)| pts[a + 1..].iter().all(|&q| c.get(p, q) == col)))
            })
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap_or(0);
        let at = solve_rt22(&c, best).map_err(|e| e.to_string())?;
        let above = solve_rt22(&c, best + 1).map_err(|e| e.to_string())?;
        if at.is_none() || above.is_some() {
            return Err(format!("{n} points, bits {bits:#x}: brute force says {best}"));
        }
    }
    Ok("500 colorings agree with brute force".into())
}

fn poset_closure(rng: &mut ChaCha8Rng) -> Result<String, String> {
    for _ in 0..50 {
        let n = rng.gen_range(1..=8usize);
        let mut leq = vec![vec![false; n]; n];
        for i in 0..n {
            leq[i][i] = true;
            for j in i + 1..n {
                leq[i][j] = rng.gen_bool(0.3);
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if leq[i][k] && leq[k][j] {
                        leq[i][j] = true;
                    }
                }
            }
        }
        let o = OrderSpec::from_fn(n, |i, j| leq[i][j]);
        let cl = closure_relation(&encode_poset(&o).map_err(|e| e.to_string())?, n as u64, n as u64);
        for x in 0..n as u64 {
            for y in 0..n as u64 {
                if cl.in_closure(y, x) != o.leq(y, x) {
                    return Err(format!("closure and order differ at {x}, {y}"));
                }
            }
        }
    }
    Ok("50 posets".into())
}

fn sigma2(rng: &mut ChaCha8Rng) -> Result<String, String> {
    for i in 0..5 {
        let flip: u64 = rng.gen();
        let th = Theta::from_fn("random", 1, move |x, _, z| flip >> (x % 64) & 1 == 1 || z < 3);
        let c = gst1_extract(&encode_sigma2(&th), &ExtractParams::new(24, 24, 6), None).map_err(|e| e.to_string())?;
        let d = decode_sigma2_solution(&th, &c, 8).map_err(|e| format!("matrix {i}: {e}"))?;
        if !c.passed() || !d.validated {
            return Err(format!("matrix {i} not validated"));
        }
    }
    Ok("5 matrices".into())
}

fn hausdorff(_: &mut ChaCha8Rng) -> Result<String, String> {
    let s = make_generated_space(LimitPoint);
    let c = hausdorff_discrete(&s, 10, &ExtractParams::new(16, 16, 10).with_horizon(64), None).map_err(|e| e.to_string())?;
    if c.passed() {
        Ok(format!("discrete on {:?}", c.points))
    } else {
        Err("limit-point certificate rejected".into())
    }
}

fn priority(_: &mut ChaCha8Rng) -> Result<String, String> {
    let mut st = init_construction(FunctionalTable::empty(), 8).map_err(|e| e.to_string())?;
    run_stages(&mut st, 2000).map_err(|e| e.to_string())?;
    if let Some((m, n)) = check_disjoint(&st, 8) {
        return Err(format!("V_{m} meets V_{n}"));
    }
    if !verify_requirements(&st, 8).all_satisfied() {
        return Err("a requirement is pending".into());
    }
    Ok("2000 stages".into())
}

fn forcing(rng: &mut ChaCha8Rng) -> Result<String, String> {
    let cases = structural_cases(rng, 4, 1);
    for (i, t) in table_corpus(rng.gen(), 10).iter().enumerate() {
        let rep = check_structural(t, &cases).map_err(|e| e.to_string())?;
        if !rep.passed() {
            return Err(format!("table {i}: {rep:?}"));
        }
    }
    Ok(format!("{} cases on 10 tables", cases.len()))
}

pub fn run(seed: u64) -> bool {
    let suites: [(&str, Suite); 8] = [
        ("coding", coding),
        ("ginsburg-sands", ginsburg_sands),
        ("rt22", rt22),
        ("poset-closure", poset_closure),
        ("sigma2", sigma2),
        ("hausdorff", hausdorff),
        ("priority", priority),
        ("forcing", forcing),
    ];
    eprintln!("seed {seed}");
    let mut ok = true;
    for (name, suite) in suites {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match suite(&mut rng) {
            Ok(msg) => println!("pass {name}: {msg}"),
            Err(msg) => {
                ok = false;
                println!("FAIL {name}: {msg}");
            }
        }
    }
    ok
}
