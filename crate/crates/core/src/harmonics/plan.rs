//! Sum-factorization plan shared by grid transforms and point evaluation.
//!
//! A harmonic is a product over nesting levels s = 0..d−2 of
//! A_{c_s}^{|c_{s+1}|}(d−s+1; t_s) times a circle factor Θ_{c_{d−1}}(φ), where
//! c = (ℓ, m₁, …, m_{d−1}). Stage s contracts chains c_s.. into their tails.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::harmonics::index::{chains, IndexTable, MultiIndex};

#[derive(Clone, Copy, Debug)]
pub(crate) struct Entry {
    pub src: u32,
    pub dst: u32,
    /// Flat index n·(lmax+1) + m into a per-node Legendre table.
    pub nm: u32,
}

#[derive(Debug)]
pub(crate) struct Plan {
    pub d: usize,
    pub lmax: usize,
    pub sizes: Vec<usize>,
    pub entries: Vec<Vec<Entry>>,
    /// Signed circle orders of the last stage.
    pub circle: Vec<i32>,
    /// Stage-0 chain → (ℓ, position in M(ℓ)).
    pub to_field: Vec<(usize, usize)>,
}

impl Plan {
    fn build(d: usize, lmax: usize) -> Self {
        let table = IndexTable::get(d, lmax);
        let all: Vec<Vec<Vec<i32>>> = (0..d).map(|s| chains(d - s, lmax)).collect();
        let sizes = all.iter().map(|c| c.len()).collect();
        let mut entries = Vec::with_capacity(d - 1);
        for s in 0..d - 1 {
            let lookup: HashMap<&[i32], u32> =
                all[s + 1].iter().enumerate().map(|(i, c)| (c.as_slice(), i as u32)).collect();
            let stage = all[s]
                .iter()
                .enumerate()
                .map(|(i, c)| Entry {
                    src: i as u32,
                    dst: lookup[&c[1..]],
                    nm: (c[0] as usize * (lmax + 1) + c[1].unsigned_abs() as usize) as u32,
                })
                .collect();
            entries.push(stage);
        }
        let circle = all[d - 1].iter().map(|c| c[0]).collect();
        let to_field = all[0]
            .iter()
            .map(|c| {
                let l = c[0] as usize;
                let m = MultiIndex(c[1..].to_vec());
                (l, table.position(l, &m).expect("chain lies in M(ℓ)"))
            })
            .collect();
        Self { d, lmax, sizes, entries, circle, to_field }
    }

    pub fn get(d: usize, lmax: usize) -> Arc<Plan> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Plan>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("plan cache poisoned");
        guard.entry((d, lmax)).or_insert_with(|| Arc::new(Plan::build(d, lmax))).clone()
    }
}
