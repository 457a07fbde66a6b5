use serde::Serialize;
use serde_json::Value;

use crate::args::OutputFormat;
use crate::CliError;

/// A verb's result in every form it supports.
pub struct Output {
    pub json: Value,
    pub csv: Option<String>,
    pub table: Option<String>,
}

impl Output {
    pub fn new(value: &impl Serialize) -> Result<Self, CliError> {
        Ok(Output {
            json: serde_json::to_value(value).map_err(|e| CliError::Invalid(e.to_string()))?,
            csv: None,
            table: None,
        })
    }

    pub fn csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    pub fn table(mut self, table: String) -> Self {
        self.table = Some(table);
        self
    }

    pub fn render(
        self,
        verb: &str,
        format: OutputFormat,
        pretty: bool,
    ) -> Result<String, CliError> {
        match format {
            OutputFormat::Csv => match self.csv {
                Some(csv) if csv.ends_with('\n') => Ok(csv),
                Some(csv) => Ok(csv + "\n"),
                None => Err(CliError::Usage(format!(
                    "`{verb}` has no CSV form; use --format json"
                ))),
            },
            OutputFormat::Json if pretty => Ok(match self.table {
                Some(t) => t,
                None => serde_json::to_string_pretty(&self.json).expect("values serialize") + "\n",
            }),
            OutputFormat::Json => Ok(self.json.to_string() + "\n"),
        }
    }
}

/// Left-aligned text table.
pub fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(headers.to_vec());
    out += &line(
        widths
            .iter()
            .map(|w| "-".repeat(*w))
            .collect::<Vec<_>>()
            .iter()
            .map(String::as_str)
            .collect(),
    );
    for row in rows {
        out += &line(row.iter().map(String::as_str).collect());
    }
    out
}

pub fn matrix_table(rows: &[Vec<f64>]) -> String {
    let n = rows.first().map_or(0, Vec::len);
    let headers: Vec<String> = std::iter::once(String::new())
        .chain((0..n).map(|j| j.to_string()))
        .collect();
    let body: Vec<Vec<String>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            std::iter::once(i.to_string())
                .chain(r.iter().map(|v| format!("{v:.6}")))
                .collect()
        })
        .collect();
    table(
        &headers.iter().map(String::as_str).collect::<Vec<_>>(),
        &body,
    )
}

pub fn weights_csv(weights: &[f64]) -> String {
    let mut out = String::from("index,weight\n");
    for (i, w) in weights.iter().enumerate() {
        out += &format!("{i},{w}\n");
    }
    out
}

pub fn weights_table(weights: &[f64], ranking: &[usize]) -> String {
    let mut rank = vec![0; weights.len()];
    for (r, &i) in ranking.iter().enumerate() {
        rank[i] = r + 1;
    }
    let rows: Vec<Vec<String>> = weights
        .iter()
        .enumerate()
        .map(|(i, w)| vec![i.to_string(), format!("{w:.6}"), rank[i].to_string()])
        .collect();
    table(&["item", "weight", "rank"], &rows)
}

/// `key,value` lines for the scalar fields of a JSON object.
pub fn fields_csv(value: &Value) -> String {
    let mut out = String::from("field,value\n");
    if let Value::Object(map) = value {
        for (k, v) in map {
            if !v.is_object() && !v.is_array() {
                out += &format!("{k},{}\n", v.to_string().trim_matches('"'));
            }
        }
    }
    out
}

pub fn fields_table(value: &Value) -> String {
    let mut rows = Vec::new();
    if let Value::Object(map) = value {
        for (k, v) in map {
            rows.push(vec![k.clone(), v.to_string().trim_matches('"').to_string()]);
        }
    }
    table(&["field", "value"], &rows)
}
