use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hkm_core::arith::Q;
use hkm_core::asym::{compare_exact, main_term, reports_to_csv, AsymReport};
use hkm_core::borcherds::{check_denominator, expand_phi1, FourierSeries2};
use hkm_core::plusforms::{
    build_fm, load_fixture, parse_fixture_unchecked, reference_f1_level17, to_csv, to_json, verify_plusform,
    PlusForm, DEFAULT_ORDER,
};
use hkm_core::qfield::pell_solutions;
use hkm_core::rootsys::{embedding_pair, imaginary_roots, real_roots, roots_to_csv, roots_to_json, RootDatum};
use hkm_core::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "hkm", version, about = "Plus-space forms, H(a) root systems and Borcherds products over Q(sqrt p)")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format for data files.
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,

    /// Write the data artifact here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Series order N.
    #[arg(long, default_value_t = DEFAULT_ORDER, global = true)]
    order: i64,

    /// Truncation height H.
    #[arg(long, default_value_t = 15, global = true)]
    height: i64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pell solutions (a_k, s_k) of a^2 - p s^2 = 4.
    Pell {
        p: u64,
        #[arg(default_value_t = 5)]
        count: u32,
    },
    /// Coefficients of f_m up to the series order.
    Fm {
        p: u64,
        m: u64,
        /// Overrides --order.
        n: Option<i64>,
    },
    /// Plus-space report for a coefficient file.
    Verify { file: PathBuf },
    /// Real roots ("re") or the imaginary roots of norm -2k.
    Roots {
        p: u64,
        kind: String,
        j_max: u32,
        /// Pell index of H(a_k).
        #[arg(long, default_value_t = 1)]
        index: u32,
    },
    /// Embedding of H(a_l) into H(a_k).
    Embed { p: u64, k: u32, l: u32 },
    /// Expands Phi_1 from an f_1 file and checks the denominator identity.
    Phi {
        p: u64,
        f1file: PathBuf,
        /// Overrides --height.
        h: Option<i64>,
    },
    /// Re-runs the denominator-identity checks on a saved expansion.
    Check { file: PathBuf },
    /// Main term of a_m(n).
    Asym {
        p: u64,
        m: i64,
        n: i64,
        /// Coefficient file for f_m.
        file: Option<PathBuf>,
        /// Compare against the exact coefficient.
        #[arg(long)]
        exact: bool,
    },
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn q_pair(q: &Q) -> String {
    format!("[{}, {}]", q.numer(), q.denom())
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

fn pell(cli: &Cli, p: u64, count: u32) -> Result<bool> {
    let fam = pell_solutions(p, count)?;
    let text = match cli.format {
        Format::Json => {
            let rows: Vec<String> = fam
                .entries
                .iter()
                .map(|e| format!("  {{\"k\": {}, \"a\": {}, \"s\": {}}}", e.k, e.a, e.s))
                .collect();
            format!(
                "{{\"p\": {}, \"eps0\": {{\"c0\": {}, \"c1\": {}}}, \"entries\": [\n{}\n]}}\n",
                p,
                q_pair(fam.eps0.c0()),
                q_pair(fam.eps0.c1()),
                rows.join(",\n")
            )
        }
        Format::Csv => csv_text(
            &["k", "a", "s"],
            fam.entries.iter().map(|e| vec![e.k.to_string(), e.a.to_string(), e.s.to_string()]).collect(),
        ),
    };
    emit(&cli.out, &text)?;
    Ok(true)
}

fn form_for(p: u64, m: u64, order: i64) -> Result<PlusForm> {
    if p == 17 && m == 1 {
        reference_f1_level17(order)
    } else {
        build_fm(p, m, order)
    }
}

fn write_form(cli: &Cli, f: &PlusForm) -> Result<()> {
    let text = match cli.format {
        Format::Json => to_json(f),
        Format::Csv => to_csv(f)?,
    };
    emit(&cli.out, &text)
}

fn fm(cli: &Cli, p: u64, m: u64, n: Option<i64>) -> Result<bool> {
    let f = form_for(p, m, n.unwrap_or(cli.order))?;
    write_form(cli, &f)?;
    let rep = verify_plusform(&f);
    if !rep.is_clean() {
        eprint!("{}", rep.render());
    }
    Ok(rep.is_clean())
}

fn verify(file: &Path) -> Result<bool> {
    let f = parse_fixture_unchecked(&fs::read_to_string(file)?)?;
    let rep = verify_plusform(&f);
    print!("{}", rep.render());
    Ok(rep.is_clean())
}

fn roots(cli: &Cli, p: u64, kind: &str, j_max: u32, index: u32) -> Result<bool> {
    let datum = RootDatum::new(p, index)?;
    let list = if kind == "re" {
        real_roots(&datum, j_max)?
    } else {
        let k: u64 = kind
            .parse()
            .map_err(|_| Error::Domain(format!("expected \"re\" or a norm index, got {kind:?}")))?;
        imaginary_roots(&datum, k, j_max)?
    };
    let text = match cli.format {
        Format::Json => roots_to_json(&datum, &list),
        Format::Csv => roots_to_csv(&datum, &list)?,
    };
    emit(&cli.out, &text)?;
    Ok(true)
}

fn embed(cli: &Cli, p: u64, k: u32, l: u32) -> Result<bool> {
    let e = embedding_pair(p, k, l)?;
    let g = &e.gram;
    let ok = !e.difference_is_root;
    let text = match cli.format {
        Format::Json => format!(
            "{{\"p\": {}, \"k\": {}, \"l\": {}, \"a_l\": {}, \"beta1\": {{\"c0\": {}, \"c1\": {}}}, \"beta2\": {{\"c0\": {}, \"c1\": {}}}, \"gram\": [[{}, {}], [{}, {}]], \"difference_is_root\": {}}}\n",
            p,
            k,
            l,
            e.a_l,
            q_pair(e.beta1.xi().c0()),
            q_pair(e.beta1.xi().c1()),
            q_pair(e.beta2.xi().c0()),
            q_pair(e.beta2.xi().c1()),
            g[0][0],
            g[0][1],
            g[1][0],
            g[1][1],
            e.difference_is_root
        ),
        Format::Csv => csv_text(
            &["p", "k", "l", "a_l", "g11", "g12", "g21", "g22", "difference_is_root"],
            vec![vec![
                p.to_string(),
                k.to_string(),
                l.to_string(),
                e.a_l.to_string(),
                g[0][0].to_string(),
                g[0][1].to_string(),
                g[1][0].to_string(),
                g[1][1].to_string(),
                e.difference_is_root.to_string(),
            ]],
        ),
    };
    emit(&cli.out, &text)?;
    if !ok {
        eprintln!("beta1 - beta2 is a root; the pair does not generate H({})", e.a_l);
    }
    Ok(ok)
}

fn write_series(cli: &Cli, s: &FourierSeries2) -> Result<()> {
    let text = match cli.format {
        Format::Json => s.to_json(),
        Format::Csv => s.to_csv()?,
    };
    emit(&cli.out, &text)
}

fn phi(cli: &Cli, p: u64, file: &Path, h: Option<i64>) -> Result<bool> {
    let f1 = load_fixture(file)?;
    if f1.p() != p {
        return Err(Error::Domain(format!("{} holds a form of level {}, expected {p}", file.display(), f1.p())));
    }
    let s = expand_phi1(p, &f1, h.unwrap_or(cli.height))?;
    write_series(cli, &s)?;
    let rep = check_denominator(&s);
    eprint!("{}", rep.render());
    Ok(rep.is_clean())
}

fn check(file: &Path) -> Result<bool> {
    let s = FourierSeries2::from_json(&fs::read_to_string(file)?)?;
    let rep = check_denominator(&s);
    print!("{}", rep.render());
    Ok(rep.is_clean())
}

fn asym(cli: &Cli, p: u64, m: i64, n: i64, file: Option<&Path>, exact: bool) -> Result<bool> {
    let report: AsymReport = if exact || file.is_some() {
        let f = match file {
            Some(path) => load_fixture(path)?,
            None => {
                let m_u = u64::try_from(m).map_err(|_| Error::Domain("m must be positive".into()))?;
                form_for(p, m_u, n.max(10))?
            }
        };
        compare_exact(p, m, n, &f)?
    } else {
        main_term(p, m, n)?
    };
    let text = match cli.format {
        Format::Json => report.to_json(),
        Format::Csv => reports_to_csv(std::slice::from_ref(&report))?,
    };
    emit(&cli.out, &text)?;
    Ok(true)
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Pell { p, count } => pell(cli, *p, *count),
        Command::Fm { p, m, n } => fm(cli, *p, *m, *n),
        Command::Verify { file } => verify(file),
        Command::Roots { p, kind, j_max, index } => roots(cli, *p, kind, *j_max, *index),
        Command::Embed { p, k, l } => embed(cli, *p, *k, *l),
        Command::Phi { p, f1file, h } => phi(cli, *p, f1file, *h),
        Command::Check { file } => check(file),
        Command::Asym { p, m, n, file, exact } => asym(cli, *p, *m, *n, file.as_deref(), *exact),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
