//! Interest prediction for users that join after the training window.
//!
//! The test file has one record per line (`#` starts a comment):
//!
//! ```text
//! friend <user> <train_user_index>
//! review <user> <business_index>
//! ```
//!
//! Indices are local to the user and business types of the training
//! network. A user's true interest is the category distribution of the
//! businesses they review; the community prediction weights community
//! profiles by where their friends sit, and the naive prediction counts the
//! categories of businesses their friends reviewed during training.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::assignment::Assignment;
use crate::hetnet::DynHetNet;
use crate::metrics::{community_profiles, jsd, predict_interest, Distribution, MetricsError};

pub const CSV_HEADER: &str = "user,jsd_dhnet,jsd_naive,cold_start";

#[derive(Debug, Error, PartialEq)]
pub enum PredictError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("type {0} out of range")]
    InvalidType(usize),
    #[error("labels cover {labels} nodes, network has {nodes}")]
    LabelMismatch { labels: usize, nodes: usize },
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PredictTypes {
    pub user: usize,
    pub business: usize,
    pub category: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TestUser {
    pub id: String,
    pub friends: Vec<usize>,
    pub reviews: Vec<usize>,
}

/// Parses test records, keeping users in order of first appearance.
pub fn parse_test_file(text: &str, num_users: usize, num_businesses: usize) -> Result<Vec<TestUser>, PredictError> {
    let mut users: Vec<TestUser> = Vec::new();
    let mut index = std::collections::HashMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let err = |msg: String| PredictError::Parse { line, msg };
        let [kind, user, target] = fields[..] else {
            return Err(err(format!("expected `friend|review <user> <index>`, got {content:?}")));
        };
        let target: usize = target.parse().map_err(|_| err(format!("bad index {target:?}")))?;
        let slot = *index.entry(user.to_string()).or_insert_with(|| {
            users.push(TestUser { id: user.to_string(), ..TestUser::default() });
            users.len() - 1
        });
        match kind {
            "friend" if target < num_users => users[slot].friends.push(target),
            "review" if target < num_businesses => users[slot].reviews.push(target),
            "friend" | "review" => return Err(err(format!("{kind} index {target} out of range"))),
            other => return Err(err(format!("unknown record {other:?}"))),
        }
    }
    Ok(users)
}

#[derive(Debug, Clone, PartialEq)]
pub struct UserPrediction {
    pub user: String,
    pub jsd_dhnet: Option<f64>,
    pub jsd_naive: Option<f64>,
    /// A prediction could not be formed; excluded from the means.
    pub cold_start: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionReport {
    pub users: Vec<UserPrediction>,
    pub mean_dhnet: Option<f64>,
    pub mean_naive: Option<f64>,
    /// Users without any categorized review; not scored.
    pub unscored: usize,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x:.6}"))
}

impl PredictionReport {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{CSV_HEADER}\n");
        for u in &self.users {
            let _ = writeln!(out, "{},{},{},{}", u.user, fmt_opt(u.jsd_dhnet), fmt_opt(u.jsd_naive), u8::from(u.cold_start));
        }
        out
    }
}

/// Distinct `(row, col)` pairs of block `(l1, l2)` over all snapshots, as
/// an adjacency list indexed by `row`.
fn union_lists(net: &DynHetNet, l1: usize, l2: usize) -> Vec<Vec<usize>> {
    let mut lists = vec![BTreeSet::new(); net.layout().size(l1)];
    for s in net.snapshots() {
        for (i, j) in s.entries(l1, l2) {
            lists[i].insert(j);
        }
    }
    lists.into_iter().map(|s| s.into_iter().collect()).collect()
}

fn category_counts<'a>(businesses: impl Iterator<Item = &'a usize>, cats: &[Vec<usize>], width: usize) -> Vec<f64> {
    let mut counts = vec![0.0; width];
    for &b in businesses {
        for &c in &cats[b] {
            counts[c] += 1.0;
        }
    }
    counts
}

pub fn predict(
    net: &DynHetNet,
    labels: &Assignment,
    users: &[TestUser],
    types: PredictTypes,
) -> Result<PredictionReport, PredictError> {
    let layout = net.layout();
    for ty in [types.user, types.business, types.category] {
        if ty >= layout.num_types() {
            return Err(PredictError::InvalidType(ty));
        }
    }
    if labels.len() != layout.num_nodes() {
        return Err(PredictError::LabelMismatch { labels: labels.len(), nodes: layout.num_nodes() });
    }
    let profiles = community_profiles(net, labels, types.category, types.business)?;
    let cats = union_lists(net, types.business, types.category);
    let reviewed = union_lists(net, types.user, types.business);
    let n_cat = layout.size(types.category);
    let user_off = layout.offset(types.user);

    let mut out = Vec::new();
    let mut unscored = 0;
    for u in users {
        let Ok(truth) = Distribution::from_counts(&category_counts(u.reviews.iter(), &cats, n_cat)) else {
            unscored += 1;
            continue;
        };
        let mut friend_counts = vec![0u64; labels.num_communities()];
        for &f in &u.friends {
            friend_counts[labels.label(user_off + f)] += 1;
        }
        let dhnet = match predict_interest(&friend_counts, &profiles) {
            Ok(g) => Some(jsd(&g, &truth)?),
            Err(MetricsError::ColdStart) => None,
            Err(e) => return Err(e.into()),
        };
        let naive_counts = category_counts(u.friends.iter().flat_map(|&f| reviewed[f].iter()), &cats, n_cat);
        let naive = match Distribution::from_counts(&naive_counts) {
            Ok(g) => Some(jsd(&g, &truth)?),
            Err(_) => None,
        };
        out.push(UserPrediction {
            user: u.id.clone(),
            cold_start: dhnet.is_none() || naive.is_none(),
            jsd_dhnet: dhnet,
            jsd_naive: naive,
        });
    }
    let mean = |pick: fn(&UserPrediction) -> Option<f64>| {
        let scored: Vec<f64> = out.iter().filter(|u| !u.cold_start).filter_map(pick).collect();
        (!scored.is_empty()).then(|| scored.iter().sum::<f64>() / scored.len() as f64)
    };
    Ok(PredictionReport {
        mean_dhnet: mean(|u| u.jsd_dhnet),
        mean_naive: mean(|u| u.jsd_naive),
        users: out,
        unscored,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hetnet::parse_network;

    // types: 0 users (4), 1 businesses (2), 2 categories (2)
    const NET: &str = "L=3 sizes=4,2,2 S=1\n\
        1 0:0 0:1\n1 0:2 0:3\n1 0:0 1:0\n1 0:1 1:0\n1 0:2 1:1\n1 0:3 1:1\n1 0:3 1:0\n\
        1 1:0 2:0\n1 1:1 2:1\n";

    #[test]
    fn parses_records() {
        let users = parse_test_file("friend a 0\nreview a 1\n# c\nfriend b 3\n", 4, 2).unwrap();
        assert_eq!(users.len(), 2);
        assert_eq!(users[0].friends, vec![0]);
        assert_eq!(users[0].reviews, vec![1]);
        assert!(parse_test_file("friend a 9\n", 4, 2).is_err());
        assert!(parse_test_file("like a 0\n", 4, 2).is_err());
    }

    #[test]
    fn exact_profile_gives_zero() {
        let net = parse_network(NET).unwrap();
        let labels = Assignment::from_labels([0u32, 0, 1, 1, 0, 1, 0, 1]);
        let users = parse_test_file("friend a 0\nfriend a 1\nreview a 0\nreview z 0\nfriend y 2\nreview y 1\nfriend y 3\n", 4, 2)
            .unwrap();
        let types = PredictTypes { user: 0, business: 1, category: 2 };
        let r = predict(&net, &labels, &users, types).unwrap();
        assert_eq!(r.users[0].jsd_dhnet, Some(0.0));
        assert_eq!(r.users[0].jsd_naive, Some(0.0));
        assert!(r.users[1].cold_start);
        assert!(r.users[1].jsd_dhnet.is_none());
        // user y: friend 3 also reviewed business 0, so the naive mix is noisy
        assert_eq!(r.users[2].jsd_dhnet, Some(0.0));
        assert!(r.users[2].jsd_naive.unwrap() > 0.0);
        assert!(r.to_csv().starts_with(CSV_HEADER));
    }
}
