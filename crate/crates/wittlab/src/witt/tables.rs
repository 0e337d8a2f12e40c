//! Universal Witt polynomial tables: the integer polynomials P_s, Q_s, N_s
//! and the Frobenius coordinate polynomials, obtained by solving the ghost
//! equations over Z[X_n; Y_m] in divisor order.
//!
//! Tables are memoized per truncation set in-process and optionally persisted
//! as one JSON document per set under `WITTLAB_CACHE_DIR` (default
//! `$XDG_CACHE_HOME/wittlab` or `$HOME/.cache/wittlab`). Cache publication is
//! atomic (write to a temp file, then rename), so concurrent readers never
//! observe a partial table.

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;
use std::sync::{Arc, Mutex, OnceLock};

use num::BigInt;
#[cfg(test)]
use num::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::ZPoly;
use crate::truncation::{strict_divisors_in, TruncationSet};

/// Coordinate polynomials for the Witt ring structure on R^S.
///
/// Variables are ordered X_{n_1} < ... < X_{n_k} < Y_{n_1} < ... < Y_{n_k}
/// where n_1 < ... < n_k are the members of S.
#[derive(Debug, Clone)]
pub struct UniversalTables {
    pub set: TruncationSet,
    /// s -> P_s with w_s(P) = w_s(X) + w_s(Y).
    pub add: BTreeMap<u64, ZPoly>,
    /// s -> Q_s with w_s(Q) = w_s(X) * w_s(Y).
    pub mul: BTreeMap<u64, ZPoly>,
    /// s -> N_s with w_s(N) = -w_s(X).
    pub neg: BTreeMap<u64, ZPoly>,
    /// (n, s in S/n) -> coordinate polynomial of F_n in the X variables.
    pub frob: BTreeMap<(u64, u64), ZPoly>,
}

impl UniversalTables {
    pub fn nvars(&self) -> usize {
        2 * self.set.len()
    }

    /// Index of the variable X_n (or Y_n with `y = true`).
    pub fn var_index(&self, n: u64, y: bool) -> usize {
        let i = self.set.index_of(n).expect("member");
        if y {
            self.set.len() + i
        } else {
            i
        }
    }

    /// The ghost polynomial w_s(X) = sum_{n | s} n X_n^{s/n} (or in Y).
    fn ghost_poly(set: &TruncationSet, s: u64, y: bool) -> ZPoly {
        let k = set.len();
        let nvars = 2 * k;
        let mut out = ZPoly::zero(nvars);
        for n in set.members() {
            if s % n == 0 {
                let i = set.index_of(n).unwrap() + if y { k } else { 0 };
                out = out.add(&ZPoly::var_pow(nvars, i, (s / n) as u32, BigInt::from(n)));
            }
        }
        out
    }

    /// Build all tables for `set` by the divisor-order ghost recursion.
    pub fn build(set: &TruncationSet) -> Result<UniversalTables> {
        let mut add = BTreeMap::new();
        let mut mul = BTreeMap::new();
        let mut neg = BTreeMap::new();
        // solve sum_{n | s} n T_n^{s/n} = target_s in divisor order
        let solve = |known: &BTreeMap<u64, ZPoly>, s: u64, target: ZPoly| -> Result<ZPoly> {
            let mut rest = target;
            for n in strict_divisors_in(set, s) {
                let t = known[&n].pow((s / n) as u32).scale(&BigInt::from(n));
                rest = rest.sub(&t);
            }
            rest.div_exact_int(&BigInt::from(s))
                .map_err(Error::IntegralityViolation)
        };
        for s in set.divisor_order() {
            let wx = Self::ghost_poly(set, s, false);
            let wy = Self::ghost_poly(set, s, true);
            let p = solve(&add, s, wx.add(&wy))?;
            add.insert(s, p);
            let q = solve(&mul, s, wx.mul(&wy))?;
            mul.insert(s, q);
            let nn = solve(&neg, s, wx.neg())?;
            neg.insert(s, nn);
        }
        let mut frob = BTreeMap::new();
        for n in set.members() {
            let sq = set.quotient(n).expect("member");
            let mut known: BTreeMap<u64, ZPoly> = BTreeMap::new();
            for v in sq.divisor_order() {
                // ghost of F_n at index v equals the ghost of X at index v*n
                let target = Self::ghost_poly(set, v * n, false);
                let mut rest = target;
                for d in strict_divisors_in(&sq, v) {
                    let t = known[&d].pow((v / d) as u32).scale(&BigInt::from(d));
                    rest = rest.sub(&t);
                }
                let f = rest
                    .div_exact_int(&BigInt::from(v))
                    .map_err(Error::IntegralityViolation)?;
                known.insert(v, f);
            }
            for (v, f) in known {
                frob.insert((n, v), f);
            }
        }
        Ok(UniversalTables {
            set: set.clone(),
            add,
            mul,
            neg,
            frob,
        })
    }
}

/// Fetch the (memoized) tables for a truncation set.
pub fn tables_for(set: &TruncationSet) -> Result<Arc<UniversalTables>> {
    static MEMO: OnceLock<Mutex<HashMap<TruncationSet, Arc<UniversalTables>>>> = OnceLock::new();
    let memo = MEMO.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = memo.lock().unwrap().get(set) {
        return Ok(t.clone());
    }
    let built = match load_from_cache(set) {
        Some(t) => Arc::new(t),
        None => {
            let t = Arc::new(UniversalTables::build(set)?);
            store_to_cache(&t);
            t
        }
    };
    memo.lock()
        .unwrap()
        .entry(set.clone())
        .or_insert_with(|| built.clone());
    Ok(built)
}

// --- file cache ---------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct TermJson(Vec<u32>, String);

#[derive(Serialize, Deserialize)]
struct TablesJson {
    #[serde(rename = "S")]
    s: Vec<u64>,
    add: BTreeMap<String, Vec<TermJson>>,
    mul: BTreeMap<String, Vec<TermJson>>,
    neg: BTreeMap<String, Vec<TermJson>>,
    frob: BTreeMap<String, Vec<TermJson>>,
}

fn poly_to_json(p: &ZPoly) -> Vec<TermJson> {
    p.terms()
        .map(|(m, c)| TermJson(m.clone(), c.to_string()))
        .collect()
}

fn poly_from_json(nvars: usize, terms: &[TermJson]) -> Option<ZPoly> {
    let mut parsed = vec![];
    for TermJson(m, c) in terms {
        if m.len() != nvars {
            return None;
        }
        parsed.push((m.clone(), c.parse::<BigInt>().ok()?));
    }
    Some(ZPoly::from_terms(nvars, parsed))
}

pub fn tables_to_json(t: &UniversalTables) -> serde_json::Value {
    let enc = |m: &BTreeMap<u64, ZPoly>| -> BTreeMap<String, Vec<TermJson>> {
        m.iter().map(|(k, p)| (k.to_string(), poly_to_json(p))).collect()
    };
    let frob: BTreeMap<String, Vec<TermJson>> = t
        .frob
        .iter()
        .map(|((n, v), p)| (format!("{},{}", n, v), poly_to_json(p)))
        .collect();
    serde_json::to_value(TablesJson {
        s: t.set.members().collect(),
        add: enc(&t.add),
        mul: enc(&t.mul),
        neg: enc(&t.neg),
        frob,
    })
    .expect("serializable")
}

fn tables_from_json(v: serde_json::Value) -> Option<UniversalTables> {
    let tj: TablesJson = serde_json::from_value(v).ok()?;
    let set = TruncationSet::new(tj.s).ok()?;
    let nvars = 2 * set.len();
    let dec = |m: &BTreeMap<String, Vec<TermJson>>| -> Option<BTreeMap<u64, ZPoly>> {
        let mut out = BTreeMap::new();
        for (k, terms) in m {
            out.insert(k.parse().ok()?, poly_from_json(nvars, terms)?);
        }
        Some(out)
    };
    let add = dec(&tj.add)?;
    let mul = dec(&tj.mul)?;
    let neg = dec(&tj.neg)?;
    let mut frob = BTreeMap::new();
    for (k, terms) in &tj.frob {
        let (n, v) = k.split_once(',')?;
        frob.insert((n.parse().ok()?, v.parse().ok()?), poly_from_json(nvars, terms)?);
    }
    for s in set.members() {
        if !add.contains_key(&s) || !mul.contains_key(&s) || !neg.contains_key(&s) {
            return None;
        }
    }
    Some(UniversalTables {
        set,
        add,
        mul,
        neg,
        frob,
    })
}

fn cache_dir() -> Option<PathBuf> {
    if let Ok(d) = std::env::var("WITTLAB_CACHE_DIR") {
        if d.is_empty() {
            return None;
        }
        return Some(PathBuf::from(d));
    }
    if let Ok(d) = std::env::var("XDG_CACHE_HOME") {
        if !d.is_empty() {
            return Some(PathBuf::from(d).join("wittlab"));
        }
    }
    std::env::var("HOME")
        .ok()
        .filter(|h| !h.is_empty())
        .map(|h| PathBuf::from(h).join(".cache").join("wittlab"))
}

pub fn cache_path(set: &TruncationSet) -> Option<PathBuf> {
    let key: Vec<String> = set.members().map(|n| n.to_string()).collect();
    cache_dir().map(|d| d.join(format!("tables_{}.json", key.join("_"))))
}

fn load_from_cache(set: &TruncationSet) -> Option<UniversalTables> {
    let path = cache_path(set)?;
    let data = std::fs::read_to_string(path).ok()?;
    let v: serde_json::Value = serde_json::from_str(&data).ok()?;
    let t = tables_from_json(v)?;
    (t.set == *set).then_some(t)
}

fn store_to_cache(t: &UniversalTables) {
    let Some(path) = cache_path(&t.set) else {
        return;
    };
    let Some(dir) = path.parent() else { return };
    if std::fs::create_dir_all(dir).is_err() {
        return;
    }
    let tmp = dir.join(format!(
        ".tables_tmp_{}_{:?}",
        std::process::id(),
        std::thread::current().id()
    ));
    let json = tables_to_json(t);
    if std::fs::write(&tmp, serde_json::to_string(&json).expect("serializable")).is_ok() {
        let _ = std::fs::rename(&tmp, &path);
    }
}
