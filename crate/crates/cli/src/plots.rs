//! Gnuplot-ready data files built from stage artifacts. Blocks are separated
//! by two blank lines so each one is addressable with `index`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::CliError;

/// Number of front phases drawn.
pub const FRONT_PHASES: usize = 4;

type Builder = fn(&Path) -> Result<String, String>;

struct Table {
    comments: Vec<String>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn col(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

fn read_table(path: &Path) -> Result<Table, String> {
    let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
    let comments = text
        .lines()
        .filter_map(|l| l.strip_prefix('#'))
        .map(|l| l.trim().to_string())
        .collect();
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = rdr
        .headers()
        .map_err(|e| e.to_string())?
        .iter()
        .map(String::from)
        .collect();
    let rows = rdr
        .records()
        .map(|r| r.map(|r| r.iter().map(String::from).collect()))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    Ok(Table { comments, header, rows })
}

fn cell(v: &str) -> &str {
    if v.is_empty() {
        "NaN"
    } else {
        v
    }
}

fn write_block(s: &mut String, title: &str, columns: &[&str], rows: impl Iterator<Item = Vec<String>>) {
    if !s.is_empty() {
        s.push_str("\n\n");
    }
    writeln!(s, "# {title}").expect("string write");
    writeln!(s, "# {}", columns.join(" ")).expect("string write");
    for r in rows {
        let line: Vec<&str> = r.iter().map(|v| cell(v)).collect();
        s.push_str(&line.join(" "));
        s.push('\n');
    }
}

fn select(t: &Table, cols: &[&str]) -> Result<Vec<usize>, String> {
    cols.iter()
        .map(|c| t.col(c).ok_or_else(|| format!("missing column {c}")))
        .collect()
}

fn front_data(dir: &Path) -> Result<String, String> {
    let t = read_table(&dir.join("front.csv"))?;
    let idx = select(&t, &["t_index", "t", "z", "P", "Q"])?;
    let mut phases: Vec<&str> = t.rows.iter().map(|r| r[idx[0]].as_str()).collect();
    phases.dedup();
    let picks: Vec<&str> = (0..FRONT_PHASES.min(phases.len()))
        .map(|k| phases[k * phases.len() / FRONT_PHASES.min(phases.len())])
        .collect();
    let mut s = String::new();
    for p in picks {
        let rows: Vec<&Vec<String>> = t.rows.iter().filter(|r| r[idx[0]] == p).collect();
        let title = format!("t = {}", rows[0][idx[1]]);
        write_block(
            &mut s,
            &title,
            &["z", "P", "Q"],
            rows.into_iter()
                .map(|r| vec![r[idx[2]].clone(), r[idx[3]].clone(), r[idx[4]].clone()]),
        );
    }
    Ok(s)
}

fn tails_data(dir: &Path) -> Result<String, String> {
    let t = read_table(&dir.join("decay_tails.csv"))?;
    let idx = select(
        &t,
        &["side", "component", "z", "log_demodulated", "fitted", "in_window"],
    )?;
    let mut keys: Vec<(String, String)> = t.rows.iter().map(|r| (r[idx[0]].clone(), r[idx[1]].clone())).collect();
    keys.dedup();
    let mut s = String::new();
    for (side, comp) in keys {
        let rows = t
            .rows
            .iter()
            .filter(|r| r[idx[0]] == side && r[idx[1]] == comp)
            .map(|r| {
                vec![
                    r[idx[2]].clone(),
                    r[idx[3]].clone(),
                    r[idx[4]].clone(),
                    r[idx[5]].clone(),
                ]
            });
        write_block(
            &mut s,
            &format!("{side} {comp}"),
            &["z", "log_demodulated", "fitted", "in_window"],
            rows,
        );
    }
    Ok(s)
}

fn entire_data(dir: &Path) -> Result<String, String> {
    let mut files: Vec<(usize, std::path::PathBuf)> = fs::read_dir(dir)
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok())
        .filter_map(|e| {
            let name = e.file_name().into_string().ok()?;
            let k = name
                .strip_prefix("entire_snapshot_")?
                .strip_suffix(".csv")?
                .parse()
                .ok()?;
            Some((k, e.path()))
        })
        .collect();
    if files.is_empty() {
        return Err("no entire_snapshot_*.csv files".into());
    }
    files.sort();
    let columns = ["x", "u", "v", "u_sub", "v_sub", "U_sup", "V_sup"];
    let mut s = String::new();
    for (_, path) in files {
        let t = read_table(&path)?;
        let idx = select(&t, &columns)?;
        let title = t.comments.first().cloned().unwrap_or_default();
        write_block(
            &mut s,
            &title,
            &columns,
            t.rows.iter().map(|r| idx.iter().map(|&i| r[i].clone()).collect()),
        );
    }
    Ok(s)
}

/// Writes `plot_front.dat`, `plot_tails.dat` and `plot_entire.dat` into
/// `dir/plots`. Artifacts that are absent or unreadable are skipped; the
/// returned list holds one warning per skipped file.
pub fn emit_plot_data(dir: &Path) -> Result<Vec<String>, CliError> {
    let plots = dir.join("plots");
    let mut warnings = Vec::new();
    let builders: [(&str, Builder); 3] = [
        ("plot_front.dat", front_data),
        ("plot_tails.dat", tails_data),
        ("plot_entire.dat", entire_data),
    ];
    for (name, build) in builders {
        match build(dir) {
            Ok(data) => {
                fs::create_dir_all(&plots).map_err(|e| CliError::io(&plots, e))?;
                let p = plots.join(name);
                fs::write(&p, data).map_err(|e| CliError::io(&p, e))?;
            }
            Err(why) => warnings.push(format!("skipping {name}: {why}")),
        }
    }
    Ok(warnings)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_dir_gives_three_warnings() {
        let dir = tempfile::tempdir().unwrap();
        let w = emit_plot_data(dir.path()).unwrap();
        assert_eq!(w.len(), 3);
        assert!(!dir.path().join("plots").exists());
    }

    #[test]
    fn front_phases_are_spread_over_the_period() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = String::from("# c = -1\nt_index,t,z,P,Q,Pz,Qz\n");
        for i in 0..8 {
            for j in 0..3 {
                writeln!(s, "{i},{},{j},0.5,0.5,0,0", i as f64 / 8.0).unwrap();
            }
        }
        fs::write(dir.path().join("front.csv"), s).unwrap();
        let w = emit_plot_data(dir.path()).unwrap();
        assert_eq!(w.len(), 2);
        let data = fs::read_to_string(dir.path().join("plots/plot_front.dat")).unwrap();
        let titles: Vec<&str> = data.lines().filter(|l| l.starts_with("# t =")).collect();
        assert_eq!(titles, ["# t = 0", "# t = 0.25", "# t = 0.5", "# t = 0.75"]);
        assert_eq!(data.matches("\n\n\n").count(), 3);
    }
}
