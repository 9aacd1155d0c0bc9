//! Label files: one `type index label` line per node, 0-based, in global
//! node order. `#` starts a comment.

use dhnet_core::hetnet::TypeLayout;
use dhnet_core::Assignment;

pub fn format_labels(layout: &TypeLayout, assignment: &Assignment) -> String {
    let mut out = String::new();
    for g in 0..layout.num_nodes() {
        let (ty, i) = layout.local(g);
        out.push_str(&format!("{ty} {i} {}\n", assignment.label(g)));
    }
    out
}

/// Raw community ids, keeping the caller's numbering.
pub fn format_raw_labels(layout: &TypeLayout, labels: &[usize]) -> String {
    let mut out = String::new();
    for (g, label) in labels.iter().enumerate() {
        let (ty, i) = layout.local(g);
        out.push_str(&format!("{ty} {i} {label}\n"));
    }
    out
}

/// Parses a label file; returns the layout implied by the indices and the
/// assignment in global order. Every `(type, index)` must appear once.
pub fn parse_labels(text: &str) -> Result<(TypeLayout, Assignment), String> {
    let mut entries: Vec<(usize, usize, u64)> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let parsed: Option<Vec<u64>> = fields.iter().map(|f| f.parse().ok()).collect();
        match parsed.as_deref() {
            Some(&[ty, i, label]) => entries.push((ty as usize, i as usize, label)),
            _ => return Err(format!("line {}: expected `type index label`, got {content:?}", n + 1)),
        }
    }
    if entries.is_empty() {
        return Err("no labels".into());
    }
    let types = entries.iter().map(|e| e.0).max().unwrap_or(0) + 1;
    let mut sizes = vec![0usize; types];
    for &(ty, i, _) in &entries {
        sizes[ty] = sizes[ty].max(i + 1);
    }
    let layout = TypeLayout::new(sizes).map_err(|e| e.to_string())?;
    let mut labels: Vec<Option<u64>> = vec![None; layout.num_nodes()];
    for &(ty, i, label) in &entries {
        let slot = &mut labels[layout.global(ty, i)];
        if slot.replace(label).is_some() {
            return Err(format!("node {ty}:{i} labeled twice"));
        }
    }
    if let Some(g) = labels.iter().position(Option::is_none) {
        let (ty, i) = layout.local(g);
        return Err(format!("node {ty}:{i} has no label"));
    }
    Ok((layout, Assignment::from_labels(labels.into_iter().flatten())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let layout = TypeLayout::new(vec![3, 2]).unwrap();
        let a = Assignment::from_labels([0u32, 1, 1, 0, 2]);
        let text = format_labels(&layout, &a);
        assert_eq!(text, "0 0 0\n0 1 1\n0 2 1\n1 0 0\n1 1 2\n");
        let (l2, b) = parse_labels(&text).unwrap();
        assert_eq!(l2, layout);
        assert_eq!(b, a);
    }

    #[test]
    fn rejects_gaps_and_duplicates() {
        assert!(parse_labels("0 0 1\n0 2 1\n").unwrap_err().contains("no label"));
        assert!(parse_labels("0 0 1\n0 0 2\n").unwrap_err().contains("twice"));
        assert!(parse_labels("0 0\n").is_err());
    }
}
