use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::records::{Category, StageRecord};
use super::EvalError;

/// A percentage held as an exact count of hundredths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Percent {
    pub hundredths: u32,
}

impl Percent {
    /// `100 * passes / count` rounded half-up to two decimals, in integers.
    pub fn of(passes: usize, count: usize) -> Percent {
        assert!(count > 0 && passes <= count);
        let (p, c) = (passes as u64, count as u64);
        Percent {
            hundredths: ((20_000 * p + c) / (2 * c)) as u32,
        }
    }

    pub fn value(self) -> f64 {
        self.hundredths as f64 / 100.0
    }

    /// Two decimals, except whole numbers print bare ("100", "66.67").
    pub fn fixed2(self) -> String {
        let (w, f) = (self.hundredths / 100, self.hundredths % 100);
        if f == 0 {
            w.to_string()
        } else {
            format!("{w}.{f:02}")
        }
    }
}

/// Shortest form: trailing zeros dropped ("87.5", "90").
impl fmt::Display for Percent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (w, r) = (self.hundredths / 100, self.hundredths % 100);
        match r {
            0 => write!(f, "{w}"),
            r if r % 10 == 0 => write!(f, "{w}.{}", r / 10),
            r => write!(f, "{w}.{r:02}"),
        }
    }
}

impl Serialize for Percent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.value())
    }
}

impl<'de> Deserialize<'de> for Percent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        if !(0.0..=100.0).contains(&v) {
            return Err(serde::de::Error::custom(format!("percentage {v} outside [0, 100]")));
        }
        Ok(Percent {
            hundredths: (v * 100.0).round() as u32,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Grouping {
    /// Four-stage records by command category.
    Category,
    /// Four-stage records by scene.
    Scene,
    /// A/B records by command category.
    Representation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub group: String,
    pub count: usize,
    /// One entry per column of the owning table.
    pub percentages: Vec<Percent>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AggregateTable {
    pub grouping: Grouping,
    /// Percentage column names, e.g. `code_pct`.
    pub columns: Vec<String>,
    /// Group rows followed by a `Total` row.
    pub rows: Vec<AggregateRow>,
}

pub const FOUR_STAGE_COLUMNS: [&str; 4] = ["code_pct", "od_pct", "wp_pct", "path_exec_pct"];
pub const REP_COLUMNS: [&str; 2] = ["a_pct", "b_pct"];

impl AggregateTable {
    pub fn row(&self, group: &str) -> Option<&AggregateRow> {
        self.rows.iter().find(|r| r.group.eq_ignore_ascii_case(group))
    }

    pub fn total(&self) -> &AggregateRow {
        self.rows.last().expect("a table always has a total row")
    }
}

fn title_case(s: &str) -> String {
    let mut c = s.chars();
    c.next()
        .map(|f| f.to_uppercase().chain(c).collect())
        .unwrap_or_default()
}

fn row(group: String, members: &[&StageRecord], width: usize) -> AggregateRow {
    let percentages = (0..width)
        .map(|k| Percent::of(members.iter().filter(|r| r.stages.flags()[k]).count(), members.len()))
        .collect();
    AggregateRow {
        group,
        count: members.len(),
        percentages,
    }
}

/// Groups records and computes per-stage pass rates. Category and scene
/// groupings read the four-stage records; representation reads the A/B
/// records. Empty groups are omitted; scenes keep first-appearance order.
pub fn aggregate(records: &[StageRecord], grouping: Grouping) -> Result<AggregateTable, EvalError> {
    let want_four = grouping != Grouping::Representation;
    let used: Vec<&StageRecord> = records.iter().filter(|r| r.stages.is_four() == want_four).collect();
    if used.is_empty() {
        return Err(EvalError::Empty);
    }
    let columns: Vec<String> = if want_four {
        FOUR_STAGE_COLUMNS.iter().map(|s| s.to_string()).collect()
    } else {
        REP_COLUMNS.iter().map(|s| s.to_string()).collect()
    };
    let groups: Vec<String> = match grouping {
        Grouping::Category | Grouping::Representation => Category::ALL.iter().map(|c| c.name().to_string()).collect(),
        Grouping::Scene => {
            let mut seen: Vec<String> = Vec::new();
            for r in &used {
                if !seen.contains(&r.scene) {
                    seen.push(r.scene.clone());
                }
            }
            seen
        }
    };
    let key = |r: &StageRecord| match grouping {
        Grouping::Scene => r.scene.clone(),
        _ => r.category.name().to_string(),
    };
    let mut rows: Vec<AggregateRow> = groups
        .into_iter()
        .filter_map(|g| {
            let members: Vec<&StageRecord> = used.iter().copied().filter(|r| key(r) == g).collect();
            let label = if grouping == Grouping::Scene { title_case(&g) } else { g };
            (!members.is_empty()).then(|| row(label, &members, columns.len()))
        })
        .collect();
    rows.push(row("Total".into(), &used, columns.len()));
    Ok(AggregateTable { grouping, columns, rows })
}
