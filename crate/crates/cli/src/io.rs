//! Local file formats handled by the command-line client.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};

use weaklab_core::disambig::DisambiguationResult;
use weaklab_core::loss::{read_loss_matrix, LossSpec};
use weaklab_core::space::Label;

pub fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(io::stdout().lock()),
    })
}

pub fn read_loss(path: &Path) -> Result<LossSpec> {
    let matrix = read_loss_matrix(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(LossSpec::from_matrix(matrix)?)
}

/// Feature rows from a CSV file. Lines starting with `#` are skipped. A
/// first row that is not numeric is a header; if it names `x_*` columns only
/// those are read.
pub fn read_features(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).comment(Some(b'#')).from_reader(text.as_bytes());
    let mut rows = Vec::new();
    let mut columns: Option<Vec<usize>> = None;
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        if i == 0 && rec.iter().any(|f| f.trim().parse::<f64>().is_err()) {
            let xs: Vec<usize> = rec.iter().enumerate().filter(|(_, h)| h.starts_with("x_")).map(|(j, _)| j).collect();
            columns = Some(if xs.is_empty() { (0..rec.len()).collect() } else { xs });
            continue;
        }
        let cols = columns.get_or_insert_with(|| (0..rec.len()).collect());
        let row = cols
            .iter()
            .map(|&j| {
                let f = rec.get(j).unwrap_or("");
                f.trim().parse::<f64>().with_context(|| format!("row {}: `{f}` is not a number", i + 1))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        bail!("no feature rows");
    }
    Ok(rows)
}

pub fn write_labels<W: Write>(out: W, labels: &[Label]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "label"])?;
    for (i, l) in labels.iter().enumerate() {
        w.write_record([i.to_string(), l.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trace<W: Write>(out: W, res: &DisambiguationResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["step", "objective"])?;
    for (i, v) in res.objective_trace.iter().enumerate() {
        w.write_record([i.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn features_with_and_without_header() {
        assert_eq!(read_features("1,2\n3,4\n").unwrap(), vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        let dataset = "# space=classes:2\nx_0,x_1,set,hidden\n0.5,1.5,\"{\"\"explicit\"\":[0]}\",0\n";
        assert_eq!(read_features(dataset).unwrap(), vec![vec![0.5, 1.5]]);
        assert!(read_features("a,b\n1,x\n").is_err());
        assert!(read_features("").is_err());
    }
}
