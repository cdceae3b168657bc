//! Result tables: fixed-width text in the familiar journal layout
//! (coefficients with t-statistics in parentheses beneath) and a machine
//! CSV with one row per (variable, horizon) cell.

use encompass_core::EncompassResult64;

use crate::CliError;

/// One comparison cell, ready for emission.
#[derive(Debug, Clone)]
pub struct ResultRow {
    pub variable: String,
    pub model_a: String,
    pub model_b: String,
    pub s: usize,
    pub result: EncompassResult64,
    pub rmse_a: f64,
    pub rmse_b: f64,
}

/// Machine CSV header.
pub const RESULTS_HEADER: &str =
    "variable,s,alpha,beta,gamma,t_alpha,t_beta,t_gamma,se,r2,nobs,cov_method,L,dropped";

/// Machine results CSV at full precision.
pub fn results_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from(RESULTS_HEADER);
    out.push('\n');
    for row in rows {
        let r = &row.result;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            row.variable,
            row.s,
            r.alpha,
            r.beta,
            r.gamma,
            r.tstats[0],
            r.tstats[1],
            r.tstats[2],
            r.se_regression,
            r.r2,
            r.nobs,
            r.cov_method,
            r.lag,
            r.dropped,
        ));
    }
    out
}

/// RMSE companion CSV: one row per (variable, horizon, model).
pub fn rmse_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from("variable,s,model,rmse\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{}\n{},{},{},{}\n",
            row.variable, row.s, row.model_a, row.rmse_a, row.variable, row.s, row.model_b,
            row.rmse_b,
        ));
    }
    out
}

fn strip_negative_zero(s: String) -> String {
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn fmt2(v: f64) -> String {
    strip_negative_zero(format!("{v:.2}"))
}

fn fmt3(v: f64) -> String {
    strip_negative_zero(format!("{v:.3}"))
}

fn fmt4(v: f64) -> String {
    strip_negative_zero(format!("{v:.4}"))
}

const COL: usize = 10;

fn header_cell(name: &str) -> String {
    let trimmed: String = name.chars().take(COL - 1).collect();
    format!("{trimmed:>COL$}")
}

/// Render grouped fixed-width tables with an RMSE companion per group.
///
/// Rows are grouped by (variable, model_a, model_b, covariance) in input
/// order; each group prints coefficient rows with parenthesized t-statistics
/// beneath, footnote lines with the realized target ranges, and its RMSE
/// table.
pub fn render_text(rows: &[ResultRow]) -> String {
    let mut out = String::from("Encompassing regression estimates\n");
    out.push_str("left-hand side: the s-quarter change; t-statistics in parentheses\n");
    if rows.is_empty() {
        out.push('\n');
        out.push_str(&table_header("model a", "model b"));
        return out;
    }

    let mut i = 0;
    while i < rows.len() {
        let key = group_key(&rows[i]);
        let mut j = i;
        while j < rows.len() && group_key(&rows[j]) == key {
            j += 1;
        }
        out.push('\n');
        out.push_str(&render_group(&rows[i..j]));
        i = j;
    }
    out
}

fn group_key(row: &ResultRow) -> (String, String, String, String) {
    (
        row.variable.clone(),
        row.model_a.clone(),
        row.model_b.clone(),
        row.result.cov_method.to_string(),
    )
}

fn table_header(model_a: &str, model_b: &str) -> String {
    format!(
        "{:>4}{}{}{}{:>COL$}{:>COL$}{:>8}\n",
        "s",
        header_cell("cnst"),
        header_cell(model_a),
        header_cell(model_b),
        "SE",
        "R2",
        "# obs."
    )
}

fn render_group(rows: &[ResultRow]) -> String {
    let first = &rows[0];
    let sep = "=".repeat(62);
    let mut out = format!(
        "{sep}\n{}: {} vs {}   (cov={})\n{sep}\n\n",
        first.variable, first.model_a, first.model_b, first.result.cov_method
    );
    out.push_str(&table_header(&first.model_a, &first.model_b));

    for row in rows {
        let r = &row.result;
        out.push_str(&format!(
            "{:>4}{:>COL$}{:>COL$}{:>COL$}{:>COL$}{:>COL$}{:>8}\n",
            row.s,
            fmt3(r.alpha),
            fmt3(r.beta),
            fmt3(r.gamma),
            fmt4(r.se_regression),
            fmt3(r.r2),
            r.nobs
        ));
        out.push_str(&format!(
            "{:>4}{:>COL$}{:>COL$}{:>COL$}\n",
            "",
            format!("({})", fmt2(r.tstats[0])),
            format!("({})", fmt2(r.tstats[1])),
            format!("({})", fmt2(r.tstats[2])),
        ));
    }

    out.push('\n');
    for row in rows {
        let r = &row.result;
        out.push_str(&format!(
            "   [s={}] L={}, targets {}, dropped {}\n",
            row.s, r.lag, r.sample, r.dropped
        ));
        if let Some(w) = &r.warning {
            out.push_str(&format!("   [s={}] warning: {w}\n", row.s));
        }
    }

    out.push_str("\nRMSE\n");
    out.push_str(&format!(
        "{:>4}{}{}\n",
        "s",
        header_cell(&first.model_a),
        header_cell(&first.model_b)
    ));
    for row in rows {
        out.push_str(&format!(
            "{:>4}{:>COL$}{:>COL$}\n",
            row.s,
            fmt4(row.rmse_a),
            fmt4(row.rmse_b)
        ));
    }
    out
}

/// Rebuild a text table from a machine results CSV (the `table` subcommand).
///
/// The machine format does not carry model names, so columns are labeled
/// generically; RMSE companions are not reproducible from it and are
/// omitted.
pub fn render_from_csv(text: &str) -> Result<String, CliError> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CliError::Config("results CSV is empty".to_string()))?;
    if header != RESULTS_HEADER {
        return Err(CliError::Config(format!(
            "unexpected results CSV header: '{header}'"
        )));
    }

    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 14 {
            return Err(CliError::Config(format!(
                "results CSV line {}: expected 14 fields, got {}",
                lineno + 2,
                fields.len()
            )));
        }
        let parse_f = |i: usize| -> Result<f64, CliError> {
            fields[i].parse().map_err(|_| {
                CliError::Config(format!(
                    "results CSV line {}: bad number '{}'",
                    lineno + 2,
                    fields[i]
                ))
            })
        };
        let parse_u = |i: usize| -> Result<usize, CliError> {
            fields[i].parse().map_err(|_| {
                CliError::Config(format!(
                    "results CSV line {}: bad integer '{}'",
                    lineno + 2,
                    fields[i]
                ))
            })
        };
        rows.push(CsvRow {
            variable: fields[0].to_string(),
            s: parse_u(1)?,
            coeffs: [parse_f(2)?, parse_f(3)?, parse_f(4)?],
            tstats: [parse_f(5)?, parse_f(6)?, parse_f(7)?],
            se: parse_f(8)?,
            r2: parse_f(9)?,
            nobs: parse_u(10)?,
            cov: fields[11].to_string(),
            lag: parse_u(12)?,
            dropped: parse_u(13)?,
        });
    }

    let mut out = String::from("Encompassing regression estimates\n");
    out.push_str("left-hand side: the s-quarter change; t-statistics in parentheses\n");
    let mut i = 0;
    while i < rows.len() {
        let key = (rows[i].variable.clone(), rows[i].cov.clone());
        let mut j = i;
        while j < rows.len() && (rows[j].variable.clone(), rows[j].cov.clone()) == key {
            j += 1;
        }
        let sep = "=".repeat(62);
        out.push_str(&format!(
            "\n{sep}\n{}: model a vs model b   (cov={})\n{sep}\n\n",
            key.0, key.1
        ));
        out.push_str(&table_header("model a", "model b"));
        for row in &rows[i..j] {
            out.push_str(&format!(
                "{:>4}{:>COL$}{:>COL$}{:>COL$}{:>COL$}{:>COL$}{:>8}\n",
                row.s,
                fmt3(row.coeffs[0]),
                fmt3(row.coeffs[1]),
                fmt3(row.coeffs[2]),
                fmt4(row.se),
                fmt3(row.r2),
                row.nobs
            ));
            out.push_str(&format!(
                "{:>4}{:>COL$}{:>COL$}{:>COL$}\n",
                "",
                format!("({})", fmt2(row.tstats[0])),
                format!("({})", fmt2(row.tstats[1])),
                format!("({})", fmt2(row.tstats[2])),
            ));
        }
        out.push('\n');
        for row in &rows[i..j] {
            out.push_str(&format!(
                "   [s={}] L={}, dropped {}\n",
                row.s, row.lag, row.dropped
            ));
        }
        i = j;
    }
    Ok(out)
}

struct CsvRow {
    variable: String,
    s: usize,
    coeffs: [f64; 3],
    tstats: [f64; 3],
    se: f64,
    r2: f64,
    nobs: usize,
    cov: String,
    lag: usize,
    dropped: usize,
}
