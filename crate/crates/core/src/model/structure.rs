use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::params::*;
use crate::error::{Error, Result};

/// Variable groups that can be structurally removed from the network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VariableGroup {
    /// Long- and short-term engagement.
    #[serde(rename = "E")]
    Engagement,
    /// Interaction with activists.
    #[serde(rename = "I")]
    Interaction,
    /// Long- and short-term media coverage.
    #[serde(rename = "M")]
    Media,
    /// Latent user sociodemographics.
    #[serde(rename = "D")]
    Demographics,
}

impl VariableGroup {
    pub const ALL: [VariableGroup; 4] = [
        VariableGroup::Engagement,
        VariableGroup::Interaction,
        VariableGroup::Media,
        VariableGroup::Demographics,
    ];

    pub fn code(self) -> &'static str {
        match self {
            VariableGroup::Engagement => "E",
            VariableGroup::Interaction => "I",
            VariableGroup::Media => "M",
            VariableGroup::Demographics => "D",
        }
    }

    /// Flat parameter slots whose edges disappear with this group.
    fn removed_slots(self) -> Vec<usize> {
        match self {
            VariableGroup::Engagement => vec![E0, E1, LOG_THETA_E, P3, S2, PS4, I2, A5],
            VariableGroup::Interaction => vec![I0, I1, I1 + 1, I1 + 2, I1 + 3, I2, A2],
            VariableGroup::Media => (S3..S3 + 3).chain(A3..A3 + 3).chain(A4..A4 + 3).collect(),
            VariableGroup::Demographics => std::iter::once(P1).chain(S1..S1 + 4).collect(),
        }
    }
}

impl fmt::Display for VariableGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for VariableGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "E" => Ok(VariableGroup::Engagement),
            "I" => Ok(VariableGroup::Interaction),
            "M" => Ok(VariableGroup::Media),
            "D" => Ok(VariableGroup::Demographics),
            other => Err(Error::invalid("ablation group", format!("unknown group {other:?}; expected one of E, I, M, D"))),
        }
    }
}

/// Parses a comma-separated group list such as `E,I,M,D`.
pub fn parse_groups(list: &str) -> Result<Vec<VariableGroup>> {
    list.split(',').filter(|s| !s.trim().is_empty()).map(str::parse).collect()
}

/// The network with zero or more variable groups deleted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Structure {
    removed: BTreeSet<VariableGroup>,
}

impl Structure {
    pub fn full() -> Self {
        Self::default()
    }

    pub fn without(groups: impl IntoIterator<Item = VariableGroup>) -> Self {
        Self {
            removed: groups.into_iter().collect(),
        }
    }

    pub fn removed(&self) -> impl Iterator<Item = VariableGroup> + '_ {
        self.removed.iter().copied()
    }

    pub fn has(&self, group: VariableGroup) -> bool {
        !self.removed.contains(&group)
    }

    pub fn is_full(&self) -> bool {
        self.removed.is_empty()
    }

    /// Label such as `full` or `no_E`.
    pub fn label(&self) -> String {
        if self.removed.is_empty() {
            "full".into()
        } else {
            let codes: Vec<_> = self.removed.iter().map(|g| g.code()).collect();
            format!("no_{}", codes.join(""))
        }
    }

    /// `true` for every flat parameter slot present in this structure.
    pub fn active_params(&self) -> [bool; N_PARAMS] {
        let mut active = [true; N_PARAMS];
        for g in &self.removed {
            for i in g.removed_slots() {
                active[i] = false;
            }
        }
        active
    }

    pub fn n_active_params(&self) -> usize {
        self.active_params().iter().filter(|&&a| a).count()
    }

    /// Latent scalars per user: four sociodemographic entries (when present)
    /// plus sympathy.
    pub fn latent_stride(&self) -> usize {
        if self.has(VariableGroup::Demographics) {
            5
        } else {
            1
        }
    }
}
