use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use sl2kirby::gauss::{fermat_compare, formal_integrate};
use sl2kirby::invariants::{
    f_asymptotic, f_p_modular, lens_closed_form, o_asymptotic, strong_fermat_case, LinkPresentation,
};
use sl2kirby::kirby::{check_kirby_pair, handle_slide, omega_p, Flavor};
use sl2kirby::scalar::{psi_p, Field};
use sl2kirby::skein::{delta, theta_closed_form};
use sl2kirby::spin::{evaluate, evaluate_mod_p};
use sl2kirby::weight::{omega_sl2, omega_t, sign_lemma_factor, weight_polynomial};
use sl2kirby::{ChordDiagram, DiagramSum, FpSeries, HbarSeries, Movie, PrimeContext, Rationals, Skein};

use crate::report::Report;
use crate::{verify, Command};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn prime(p: u64) -> Result<PrimeContext> {
    Ok(PrimeContext::new(p)?)
}

pub fn run(cmd: &Command) -> Result<Report> {
    match cmd {
        Command::Skein { jones_wenzl, theta, ortho, prime: p } => {
            let mut r = Report::new();
            let top = [jones_wenzl.iter().copied().collect::<Vec<_>>(), theta.clone().unwrap_or_default(), ortho.clone().unwrap_or_default()]
                .concat()
                .into_iter()
                .max()
                .unwrap_or(0);
            match p {
                None => {
                    r.field("field", "Q");
                    skein(&mut r, &Skein::new(Rationals, top)?, *jones_wenzl, theta.as_deref(), ortho.as_deref())?;
                }
                Some(p) => {
                    let ctx = prime(*p)?;
                    r.field("field", format!("F_{p}"));
                    skein(&mut r, &Skein::new(ctx, top)?, *jones_wenzl, theta.as_deref(), ortho.as_deref())?;
                }
            }
            Ok(r)
        }
        Command::SpinEval { net, prime: p } => {
            let movie = Movie::parse(&read(net)?)?;
            let mut r = Report::new();
            match p {
                None => r.field("value", evaluate(&movie)?),
                Some(p) => {
                    let ctx = prime(*p)?;
                    r.field("prime", p);
                    r.field("value", evaluate_mod_p(&movie, &ctx)?);
                }
            }
            Ok(r)
        }
        Command::Weight { diagram, colors, skein: with_skein, prime: p, interpolate } => {
            let d = ChordDiagram::parse(&read(diagram)?)?;
            let mut r = Report::new();
            r.field("circles", d.circle_count());
            r.field("degree", d.degree());
            if let Some(lam) = colors {
                if lam.len() != d.circle_count() {
                    bail!("{} colors given for {} circles", lam.len(), d.circle_count());
                }
                let v = omega_sl2(&d, lam)?;
                r.field("omega_sl2", &v);
                let ctx = p.map(prime).transpose()?;
                if let Some(ctx) = &ctx {
                    r.field("omega_sl2.mod_p", psi_p(&v, ctx)?);
                }
                if *with_skein {
                    let sign = sign_lemma_factor(&d, lam);
                    r.field("sign", sign);
                    let top = lam.iter().copied().max().unwrap_or(0);
                    match &ctx {
                        None => {
                            let t = omega_t(&d, lam, &Skein::rational(top))?;
                            r.field("omega_t", &t);
                            r.check("sign_relation", v == t * sl2kirby::Rational::from(sign));
                        }
                        Some(ctx) => {
                            let t = omega_t(&d, lam, &Skein::new(ctx.clone(), top)?)?;
                            r.field("omega_t.mod_p", t);
                            r.check("sign_relation", psi_p(&v, ctx)? == t * ctx.elem(sign));
                        }
                    }
                }
            }
            if *interpolate {
                let w = weight_polynomial(&d)?;
                r.field("polynomial", &w.poly);
                r.field("integrality_scale", w.integrality_scale());
                for (e, c) in w.scaled_coefficients() {
                    let idx: Vec<String> = e.iter().map(|k| k.to_string()).collect();
                    r.field(format!("scaled[{}]", idx.join(",")), c);
                }
                r.check("odd", w.is_odd());
                r.check("degree_bound", w.degree_within_bound());
                r.check("integral", w.scaled_is_integral());
            }
            Ok(r)
        }
        Command::Kirby { diagram, check_pair, check_slide, donor, receiver, prime: p, flavor } => {
            let ctx = prime(*p)?;
            let mut r = Report::new();
            r.field("prime", p);
            r.field("flavor", flavor);
            if let Some(path) = diagram {
                let s = DiagramSum::parse(&read(path)?)?;
                r.field("omega_p", omega_p(&s, &ctx, *flavor)?);
            }
            if let Some(files) = check_pair {
                let a = DiagramSum::parse(&read(&files[0])?)?;
                let b = DiagramSum::parse(&read(&files[1])?)?;
                pair(&mut r, &a, &b, &ctx, *flavor)?;
            }
            if let Some(path) = check_slide {
                let d = ChordDiagram::parse(&read(path)?)?;
                let (j, i) = (donor.unwrap(), receiver.unwrap());
                if j >= d.circle_count() || i >= d.circle_count() || i == j {
                    bail!("donor and receiver must be distinct circles below {}", d.circle_count());
                }
                let slid = handle_slide(&d, j, i)?;
                r.field("slide.terms", slid.len());
                pair(&mut r, &DiagramSum::single(d), &slid, &ctx, *flavor)?;
            }
            Ok(r)
        }
        Command::Gauss { poly, framings, order } => {
            let s = HbarSeries::parse(&read(poly)?, framings.len())?;
            let mut r = Report::new();
            r.field("framings", join(framings));
            r.series("integral", &formal_integrate(&s, framings, *order)?);
            Ok(r)
        }
        Command::Fermat { sequence, limit, diagram, framing, primes, flavor, emit } => {
            let mut r = Report::new();
            if let Some(dir) = sequence {
                let limit = HbarSeries::parse(&read(limit.as_ref().unwrap())?, 0)?;
                let seq = read_sequences(dir)?;
                fermat_rows(&mut r, &fermat_compare(&seq, &limit)?);
            }
            if let Some(path) = diagram {
                let d = ChordDiagram::parse(&read(path)?)?;
                let case = strong_fermat_case(&d, framing.as_ref().unwrap(), primes.as_ref().unwrap(), *flavor)?;
                r.field("flavor", flavor);
                r.series("limit", &case.limit);
                for s in &case.sequence {
                    r.fp_series(format!("F^{}", s.p()), s);
                }
                fermat_rows(&mut r, &case.report);
                if let Some(dir) = emit {
                    fs::create_dir_all(dir)?;
                    for s in &case.sequence {
                        fs::write(dir.join(format!("p{}.fpseries", s.p())), format!("prime {}\n{s}", s.p()))?;
                    }
                    fs::write(dir.join("limit.series"), case.limit.to_string())?;
                }
            }
            Ok(r)
        }
        Command::Invariant { link, order, prime: p, flavor } => {
            let link = LinkPresentation::parse(link, &mut |f| fs::read_to_string(f).map_err(|e| sl2kirby::Error::Parse(format!("{f}: {e}"))))?;
            let mut r = Report::new();
            r.field("link", &link);
            let f = f_asymptotic(&link, *order)?;
            r.series("F", &f);
            r.series("O", &o_asymptotic(&link, *order)?);
            if let Some(p) = p {
                let ctx = prime(*p)?;
                let fp = f_p_modular(&link, &ctx, *flavor)?;
                r.field("flavor", flavor);
                r.fp_series(format!("F^{p}"), &fp);
                if *order >= ctx.n_p() {
                    fermat_rows(&mut r, &fermat_compare(&[fp], &f)?);
                }
            }
            Ok(r)
        }
        Command::Lens { n, order } => {
            let o = o_asymptotic(&LinkPresentation::unknot(*n), *order)?;
            let mut r = Report::new();
            r.field("lens", format!("L({n},1)"));
            r.series("O", &o);
            r.check("closed_form", o == lens_closed_form(*n, *order)?);
            Ok(r)
        }
        Command::Verify { suite, seed } => verify::run(suite, *seed),
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn skein<F: Field>(r: &mut Report, s: &Skein<F>, jw: Option<usize>, theta: Option<&[usize]>, ortho: Option<&[usize]>) -> Result<()> {
    let field = s.field();
    if let Some(n) = jw {
        let f = s.projector(n)?;
        r.field("jones_wenzl.n", n);
        r.field("jones_wenzl.terms", f.len());
        for (i, (m, c)) in f.sorted_terms().into_iter().enumerate() {
            r.field(format!("jones_wenzl.term[{i}]"), format!("{c} {m}"));
        }
        let t = s.trace(f)?;
        r.field("jones_wenzl.trace", &t);
        r.check("jones_wenzl.trace_check", t == field.from_rational(&delta(n))?);
    }
    if let Some(&[i, j, k]) = theta {
        let v = s.theta_pairing(i, j, k)?;
        let want = field.from_rational(&theta_closed_form(i, j, k)?)?;
        r.field("theta", &v);
        r.field("theta.closed_form", &want);
        r.check("theta.check", v == want);
    }
    if let Some(&[i, j, k, l]) = ortho {
        let c = s.orthogonality_check(l, i, j, k)?;
        let want = if i == l { field.from_rational(&(theta_closed_form(i, j, k)? / delta(i)))? } else { field.zero() };
        r.field("ortho", &c);
        r.field("ortho.expected", &want);
        r.check("ortho.check", c == want);
    }
    Ok(())
}

fn pair(r: &mut Report, a: &DiagramSum, b: &DiagramSum, ctx: &PrimeContext, flavor: Flavor) -> Result<()> {
    if a.circle_count() != b.circle_count() {
        bail!("the sums live on {} and {} circles", a.circle_count(), b.circle_count());
    }
    r.field("left", omega_p(a, ctx, flavor)?);
    r.field("right", omega_p(b, ctx, flavor)?);
    r.check("equal", check_kirby_pair(a, b, ctx, flavor)?);
    Ok(())
}

fn fermat_rows(r: &mut Report, rep: &sl2kirby::gauss::FermatReport) {
    use sl2kirby::gauss::FermatStatus;
    for (p, status) in &rep.rows {
        match status {
            FermatStatus::Pass => r.check(format!("p={p}"), true),
            FermatStatus::Fail(d) => {
                r.check(format!("p={p}"), false);
                r.field(format!("p={p}.first_mismatch"), format!("hbar^{d}"));
            }
            FermatStatus::Excluded => r.field(format!("p={p}"), "EXCLUDED"),
        }
    }
    r.field("threshold", rep.threshold());
}

/// Files `*.fpseries`: a `prime p` header, then `hbar^n: c` lines.
fn parse_fp_series(text: &str) -> Result<FpSeries> {
    let mut ctx = None;
    let mut coeffs = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        if let Some(p) = line.strip_prefix("prime ") {
            ctx = Some(prime(p.trim().parse().context("bad prime")?)?);
            continue;
        }
        let ctx = ctx.as_ref().context("missing prime header")?;
        let (head, value) = line.split_once(':').context("expected hbar^n: c")?;
        let n: usize = head.trim().strip_prefix("hbar^").context("expected hbar^n")?.parse().context("bad degree")?;
        if n != coeffs.len() {
            bail!("degree {n} out of sequence");
        }
        coeffs.push(ctx.elem(value.trim().parse().context("bad coefficient")?));
    }
    Ok(FpSeries::new(ctx.as_ref().context("missing prime header")?, coeffs)?)
}

fn read_sequences(dir: &Path) -> Result<Vec<FpSeries>> {
    let mut paths: Vec<_> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "fpseries"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        bail!("no .fpseries files in {}", dir.display());
    }
    let mut out = paths.iter().map(|p| parse_fp_series(&read(p)?).with_context(|| p.display().to_string())).collect::<Result<Vec<_>>>()?;
    out.sort_by_key(|s| s.p());
    Ok(out)
}
