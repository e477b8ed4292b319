use serde::Serialize;

use super::PipelineError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainReading {
    /// t_i -> p_(min(i+2, n-2), i), every clamp reported.
    Clamped,
    /// t_i -> p_(i+2, i) exactly as tabulated.
    Literal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ChainEntry {
    pub stable: usize,
    pub cusp: usize,
    pub k: usize,
    /// Chain index before clamping.
    pub tabulated_k: usize,
    pub label: String,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainAssignment {
    pub n: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub reading: ChainReading,
    pub table: Vec<ChainEntry>,
    pub flags: Vec<String>,
}

/// Every cusp chain complete: p_(2,i), ..., p_(n-2,i).
pub fn full_chains(n: usize, big_n: usize) -> Vec<Vec<usize>> {
    vec![(2..=n.saturating_sub(2)).collect(); big_n]
}

/// Assigns to each t_i the parabolic p_(i+2,i) for i <= n-3 and p_(2,i)
/// otherwise. `chains[i]` lists the k for which p_(k,i) exists.
pub fn assign_stable_letters(
    n: usize,
    big_n: usize,
    chains: &[Vec<usize>],
    reading: ChainReading,
) -> Result<ChainAssignment, PipelineError> {
    if n < 4 {
        return Err(PipelineError::Precondition(format!(
            "n = {n} < 4 has no chain parabolics"
        )));
    }
    if big_n + 3 <= n {
        return Err(PipelineError::Precondition(format!(
            "N = {big_n} must exceed n - 3 = {}",
            n - 3
        )));
    }
    if chains.len() != big_n {
        return Err(PipelineError::Precondition(format!(
            "{} cusp chains supplied for N = {big_n}",
            chains.len()
        )));
    }
    let mut table = Vec::new();
    let mut flags = Vec::new();
    for (i, chain) in chains.iter().enumerate() {
        let tabulated = if i + 3 <= n { i + 2 } else { 2 };
        let k = match reading {
            ChainReading::Literal => tabulated,
            ChainReading::Clamped => tabulated.min(n - 2),
        };
        if !chain.contains(&k) {
            return Err(PipelineError::MissingChainEntry { k, i });
        }
        let flagged = k != tabulated;
        if flagged {
            flags.push(format!(
                "t_{i}: p_({tabulated},{i}) is outside the chain, clamped to p_({k},{i})"
            ));
        }
        table.push(ChainEntry {
            stable: i,
            cusp: i,
            k,
            tabulated_k: tabulated,
            label: format!("p_({k},{i})"),
            flagged,
        });
    }
    Ok(ChainAssignment {
        n,
        big_n,
        reading,
        table,
        flags,
    })
}
