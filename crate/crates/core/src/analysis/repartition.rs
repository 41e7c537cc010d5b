use crate::error::{Error, Result};
use crate::hash::{chaos_hash, ChaosHashParams};

/// One plotted point: a symbol value and its 1-based position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RepartitionRow {
    pub value: u8,
    pub position: usize,
}

/// Value/position tables for a text (ASCII codes) and its digest (hex digit
/// values 0-15).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepartitionExport {
    pub source: Vec<RepartitionRow>,
    pub digest: Vec<RepartitionRow>,
}

impl RepartitionExport {
    pub const CSV_HEADER: &'static str = "table,value,position";

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(16 * (self.source.len() + self.digest.len()));
        out.push_str(Self::CSV_HEADER);
        out.push('\n');
        for (table, rows) in [("source", &self.source), ("digest", &self.digest)] {
            for row in rows {
                out.push_str(&format!("{table},{},{}\n", row.value, row.position));
            }
        }
        out
    }
}

pub fn repartition_export(params: &ChaosHashParams, text: &[u8]) -> Result<RepartitionExport> {
    let hex = chaos_hash(params, text)?;
    let source = text
        .iter()
        .enumerate()
        .map(|(k, &value)| RepartitionRow {
            value,
            position: k + 1,
        })
        .collect();
    let digest = hex
        .chars()
        .enumerate()
        .map(|(k, c)| {
            let value = c.to_digit(16).ok_or(Error::InvalidHex {
                position: k,
                digit: c,
            })?;
            Ok(RepartitionRow {
                value: value as u8,
                position: k + 1,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RepartitionExport { source, digest })
}
