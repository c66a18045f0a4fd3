use ppv_core::presets::Sweep;

fn axes(sweep: Sweep) -> (&'static str, &'static str, &'static str) {
    match sweep {
        Sweep::RateVsSnr => ("snr_db", "rate_bits", "SNR (dB)"),
        Sweep::RateVsEbn0 => ("snr_db", "rate_bits", "Eb/N0 (dB)"),
        Sweep::PerVsSnr => ("snr_db", "log10_pe_lower", "SNR (dB)"),
        Sweep::ExcessPower => ("snr_db", "excess_db", "SNR (dB)"),
        Sweep::HighSnrAsymptote => ("n", "excess_db", "n"),
    }
}

/// A standalone matplotlib script drawing one curve per `(n, method)`.
pub fn script(sweep: Sweep, csv_path: &str) -> String {
    let (x, y, xlabel) = axes(sweep);
    let logx = if sweep == Sweep::HighSnrAsymptote { "ax.set_xscale('log')\n" } else { "" };
    format!(
        r#"import csv
from collections import defaultdict
import matplotlib.pyplot as plt

curves = defaultdict(list)
with open({csv_path:?}) as f:
    for row in csv.DictReader(f):
        if row["{y}"] == "":
            continue
        key = row["method"] if "{x}" == "n" else (row["n"], row["method"])
        curves[key].append((float(row["{x}"]), float(row["{y}"])))

fig, ax = plt.subplots()
for key, pts in sorted(curves.items(), key=lambda kv: str(kv[0])):
    pts.sort()
    label = key if isinstance(key, str) else f"n={{key[0]}} {{key[1]}}"
    ax.plot([p[0] for p in pts], [p[1] for p in pts], label=label)
{logx}ax.set_xlabel("{xlabel}")
ax.set_ylabel("{y}")
ax.set_title("{name}")
ax.grid(True, alpha=0.3)
ax.legend(fontsize="small")
fig.savefig({png:?}, dpi=150)
"#,
        name = sweep.name(),
        png = format!("{}.png", csv_path.trim_end_matches(".csv")),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn script_names_columns() {
        let s = script(Sweep::PerVsSnr, "out.csv");
        assert!(s.contains("log10_pe_lower"));
        assert!(s.contains("\"out.png\""));
        assert!(script(Sweep::HighSnrAsymptote, "h.csv").contains("set_xscale"));
    }
}
