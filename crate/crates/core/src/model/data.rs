use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-subreddit sociodemographic scores and popularity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubredditCatalog {
    names: Vec<String>,
    scores: Vec<[f64; 4]>,
    popularity: Vec<f64>,
}

impl SubredditCatalog {
    /// Builds a catalog, rejecting empty catalogs, duplicate names and
    /// non-finite entries.
    pub fn new(names: Vec<String>, scores: Vec<[f64; 4]>, popularity: Vec<f64>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::invalid("catalog", "K must be at least 1"));
        }
        if scores.len() != names.len() {
            return Err(Error::dim("catalog score rows", names.len(), scores.len()));
        }
        if popularity.len() != names.len() {
            return Err(Error::dim("catalog popularity", names.len(), popularity.len()));
        }
        let mut seen = HashSet::with_capacity(names.len());
        for (k, name) in names.iter().enumerate() {
            if !seen.insert(name.as_str()) {
                return Err(Error::invalid("catalog", format!("duplicate subreddit name {name:?}")));
            }
            if scores[k].iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid("catalog", format!("non-finite score for {name:?}")));
            }
            if !popularity[k].is_finite() {
                return Err(Error::invalid("catalog", format!("non-finite popularity for {name:?}")));
            }
        }
        Ok(Self {
            names,
            scores,
            popularity,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Score rows, one 4-vector per subreddit.
    pub fn scores(&self) -> &[[f64; 4]] {
        &self.scores
    }

    /// Popularity z-scores.
    pub fn popularity(&self) -> &[f64] {
        &self.popularity
    }
}

/// Observed variables of one user.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UserObservation {
    pub id: String,
    pub p_long: Vec<bool>,
    pub p_short: Vec<bool>,
    pub e_long: f64,
    pub e_short: f64,
    pub m_long: [f64; 3],
    pub m_short: [f64; 3],
    pub interacted: bool,
    pub activated: bool,
    pub location: Option<String>,
}

impl UserObservation {
    pub fn validate(&self, k: usize) -> Result<()> {
        if self.p_long.len() != k {
            return Err(Error::dim(format!("P_L of user {}", self.id), k, self.p_long.len()));
        }
        if self.p_short.len() != k {
            return Err(Error::dim(format!("P_S of user {}", self.id), k, self.p_short.len()));
        }
        let finite = self.e_long.is_finite()
            && self.e_short.is_finite()
            && self.m_long.iter().chain(&self.m_short).all(|v| v.is_finite());
        if !finite {
            return Err(Error::invalid(format!("user {}", self.id), "non-finite feature"));
        }
        Ok(())
    }

    /// Sum of the score rows of the short-term participated subreddits.
    pub fn short_score_sum(&self, catalog: &SubredditCatalog) -> [f64; 4] {
        let mut q = [0.0; 4];
        for (row, _) in catalog.scores().iter().zip(&self.p_short).filter(|(_, &p)| p) {
            for j in 0..4 {
                q[j] += row[j];
            }
        }
        q
    }
}

/// Per-user latent sociodemographics and sympathy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatentState {
    pub demographics: Vec<[f64; 4]>,
    pub sympathy: Vec<f64>,
}

impl LatentState {
    pub fn zeros(n_users: usize) -> Self {
        Self {
            demographics: vec![[0.0; 4]; n_users],
            sympathy: vec![0.0; n_users],
        }
    }

    pub fn len(&self) -> usize {
        self.sympathy.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sympathy.is_empty()
    }

    pub fn validate(&self, n_users: usize) -> Result<()> {
        if self.demographics.len() != n_users {
            return Err(Error::dim("latent D rows", n_users, self.demographics.len()));
        }
        if self.sympathy.len() != n_users {
            return Err(Error::dim("latent S", n_users, self.sympathy.len()));
        }
        let finite = self.demographics.iter().flatten().chain(&self.sympathy).all(|v| v.is_finite());
        if !finite {
            return Err(Error::invalid("latent state", "non-finite entry"));
        }
        Ok(())
    }
}

/// A validated catalog together with the users observed against it.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub catalog: SubredditCatalog,
    pub users: Vec<UserObservation>,
}

impl Dataset {
    pub fn new(catalog: SubredditCatalog, users: Vec<UserObservation>) -> Result<Self> {
        let mut ids = HashSet::with_capacity(users.len());
        for u in &users {
            u.validate(catalog.len())?;
            if !ids.insert(u.id.as_str()) {
                return Err(Error::invalid("users", format!("duplicate user id {:?}", u.id)));
            }
        }
        Ok(Self { catalog, users })
    }

    pub fn n_users(&self) -> usize {
        self.users.len()
    }

    /// Fraction of activated users.
    pub fn activation_rate(&self) -> f64 {
        if self.users.is_empty() {
            return 0.0;
        }
        self.users.iter().filter(|u| u.activated).count() as f64 / self.users.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_rejects_bad_input() {
        assert!(SubredditCatalog::new(vec![], vec![], vec![]).is_err());
        assert!(SubredditCatalog::new(vec!["a".into(), "a".into()], vec![[0.0; 4]; 2], vec![0.0; 2]).is_err());
        assert!(SubredditCatalog::new(vec!["a".into()], vec![[f64::NAN, 0.0, 0.0, 0.0]], vec![0.0]).is_err());
        assert!(SubredditCatalog::new(vec!["a".into()], vec![[0.0; 4]], vec![0.0, 1.0]).is_err());
        assert!(SubredditCatalog::new(vec!["a".into()], vec![[0.0; 4]], vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn short_score_sum_adds_participated_rows() {
        let cat = SubredditCatalog::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![[1.0, 2.0, 3.0, 4.0], [10.0, 0.0, 0.0, 0.0], [0.5, 0.5, 0.5, 0.5]],
            vec![0.0; 3],
        )
        .unwrap();
        let u = UserObservation {
            id: "u".into(),
            p_long: vec![false; 3],
            p_short: vec![true, false, true],
            e_long: 0.0,
            e_short: 0.0,
            m_long: [0.0; 3],
            m_short: [0.0; 3],
            interacted: false,
            activated: false,
            location: None,
        };
        assert_eq!(u.short_score_sum(&cat), [1.5, 2.5, 3.5, 4.5]);
    }
}
