use std::io::{BufRead, Write};

use super::{EvaluationPoint, ParetoFront, SearchError};

/// One JSON object per line.
pub fn write_jsonl<W: Write>(points: &[EvaluationPoint], mut w: W) -> Result<(), SearchError> {
    for p in points {
        serde_json::to_writer(&mut w, p)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_jsonl<R: BufRead>(r: R) -> Result<Vec<EvaluationPoint>, SearchError> {
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}

/// Columns: level, mcc_loss, di_loss, alpha, beta, gamma, threshold.
pub fn write_front_csv<W: Write>(front: &ParetoFront, w: W) -> Result<(), SearchError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["level", "mcc_loss", "di_loss", "alpha", "beta", "gamma", "threshold"])?;
    for p in &front.points {
        let (m, d) = p.losses().expect("front members are valid");
        out.write_record([
            p.level.to_string(),
            m.to_string(),
            d.to_string(),
            p.params.alpha.to_string(),
            p.params.beta.to_string(),
            p.params.gamma.to_string(),
            p.threshold.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::pareto::testing::point;

    #[test]
    fn jsonl_round_trip() {
        let mut failed = point(5, 0.1, 0.2);
        failed.report = None;
        failed.failure = Some("sample infeasible".into());
        let pts = vec![point(1, 0.3, 0.4), failed];
        let mut buf = Vec::new();
        write_jsonl(&pts, &mut buf).unwrap();
        assert_eq!(String::from_utf8_lossy(&buf).lines().count(), 2);
        assert_eq!(read_jsonl(buf.as_slice()).unwrap(), pts);
    }

    #[test]
    fn front_csv_layout() {
        let front = ParetoFront {
            points: vec![point(10203, 0.25, 0.5)],
        };
        let mut buf = Vec::new();
        write_front_csv(&front, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "level,mcc_loss,di_loss,alpha,beta,gamma,threshold\n0,0.25,0.5,0.01,0.02,0.03,0.5\n"
        );
    }
}
