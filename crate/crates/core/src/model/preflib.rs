//! PrefLib strict-complete-order (`.soc`) ingestion.
//!
//! Both the current layout (`# NUMBER ALTERNATIVES: m` metadata followed by
//! `count: i1,i2,...,im` lines) and the legacy layout (a bare `m` line, `m`
//! name lines, a voter summary line, then `count,i1,...,im` lines) are
//! accepted. Item references are 1-based and may carry an `a` prefix.

use crate::error::{Error, Result};
use crate::model::{borda_profile, UtilityMatrix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreflibProfile {
    pub m: usize,
    /// Item names when the file provides them.
    pub names: Vec<Option<String>>,
    /// One ranking per agent (multiplicities expanded), best item first, 0-based.
    pub rankings: Vec<Vec<usize>>,
}

impl PreflibProfile {
    pub fn to_borda(&self) -> Result<UtilityMatrix> {
        borda_profile(&self.rankings, self.m)
    }
}

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column: 1,
        message: message.into(),
    }
}

fn parse_item(tok: &str, m: usize, line: usize) -> Result<usize> {
    let t = tok.trim();
    if t.starts_with('{') || t.ends_with('}') {
        return Err(perr(line, "weak orders are not supported"));
    }
    let digits = t.strip_prefix('a').unwrap_or(t);
    let idx: usize = digits
        .parse()
        .map_err(|_| perr(line, format!("invalid item reference `{t}`")))?;
    if idx == 0 || idx > m {
        return Err(perr(line, format!("item {idx} outside 1..={m}")));
    }
    Ok(idx - 1)
}

fn parse_order(items: &str, m: usize, line: usize) -> Result<Vec<usize>> {
    let order = items
        .split(',')
        .map(|t| parse_item(t, m, line))
        .collect::<Result<Vec<_>>>()?;
    if order.len() != m {
        return Err(perr(
            line,
            format!("incomplete order: {} of {m} items", order.len()),
        ));
    }
    let mut seen = vec![false; m];
    for &i in &order {
        if std::mem::replace(&mut seen[i], true) {
            return Err(perr(line, format!("item a{} ranked twice", i + 1)));
        }
    }
    Ok(order)
}

fn parse_count(tok: &str, line: usize) -> Result<usize> {
    tok.trim()
        .parse()
        .map_err(|_| perr(line, format!("invalid multiplicity `{}`", tok.trim())))
}

pub fn parse_preflib_soc(text: &str) -> Result<PreflibProfile> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();

    let mut m = None;
    let mut names: Vec<Option<String>> = Vec::new();
    for (_, l) in lines.iter().filter(|(_, l)| l.starts_with('#')) {
        let meta = l.trim_start_matches('#').trim();
        if let Some(v) = meta.strip_prefix("NUMBER ALTERNATIVES:") {
            m = v.trim().parse().ok();
        } else if let Some(rest) = meta.strip_prefix("ALTERNATIVE NAME ") {
            if let Some((idx, name)) = rest.split_once(':') {
                if let Ok(idx) = idx.trim().parse::<usize>() {
                    if names.len() < idx {
                        names.resize(idx, None);
                    }
                    names[idx - 1] = Some(name.trim().to_string());
                }
            }
        }
    }
    let data: Vec<(usize, &str)> = lines.into_iter().filter(|(_, l)| !l.starts_with('#')).collect();

    let mut rankings = Vec::new();
    let m = match m {
        Some(m) => {
            for &(no, l) in &data {
                let (count, order) = l
                    .split_once(':')
                    .ok_or_else(|| perr(no, "expected `count: i1,i2,...`"))?;
                let count = parse_count(count, no)?;
                let order = parse_order(order, m, no)?;
                rankings.extend(std::iter::repeat(order).take(count));
            }
            m
        }
        None => {
            let (no, first) = *data.first().ok_or_else(|| perr(1, "empty PrefLib file"))?;
            let m: usize = first
                .parse()
                .map_err(|_| perr(no, "missing `# NUMBER ALTERNATIVES` or legacy item count"))?;
            if data.len() < m + 2 {
                return Err(perr(no, "truncated legacy PrefLib header"));
            }
            names = data[1..=m]
                .iter()
                .map(|(_, l)| l.split_once(',').map(|(_, n)| n.trim().to_string()))
                .collect();
            for &(no, l) in &data[m + 2..] {
                let (count, order) = l
                    .split_once(',')
                    .ok_or_else(|| perr(no, "expected `count,i1,i2,...`"))?;
                let count = parse_count(count, no)?;
                rankings.extend(std::iter::repeat(parse_order(order, m, no)?).take(count));
            }
            m
        }
    };
    if m == 0 {
        return Err(perr(1, "no alternatives"));
    }
    if rankings.is_empty() {
        return Err(perr(1, "no voters"));
    }
    names.resize(m, None);
    Ok(PreflibProfile { m, names, rankings })
}
