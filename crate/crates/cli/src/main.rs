use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ultrahier::baire::{self, BaireString, DnaScheme};
use ultrahier::haar::{haar_forward, haar_inverse, haar_threshold};
use ultrahier::io::{self as uio, Precision};
use ultrahier::lattice::{build_semilattice, clusters_at_level};
use ultrahier::padic::{self, PadicEncoding, PadicEncodingDoc};
use ultrahier::permutations::{self as perms, PackedPermutation, TieRule};
use ultrahier::render::render_dendrogram;
use ultrahier::ultrametric::{self as um, CloudLaw};
use ultrahier::{agglomerate, agglomerate_contiguous, pairwise_distances, Dendrogram64, Error, Linkage, Metric, Result};

#[derive(Parser)]
#[command(name = "ultrahier", version, about = "Hierarchical clustering, ultrametrics and their encodings")]
struct Cli {
    /// Print floating point values in full instead of 7 significant digits.
    #[arg(long, global = true)]
    full_precision: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Write to this file instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ClusterOpts {
    #[arg(long, default_value = "complete")]
    linkage: Linkage,
    #[arg(long, default_value = "euclidean")]
    metric: Metric,
    /// Only merge clusters adjacent in input row order.
    #[arg(long)]
    contiguous: bool,
    /// Treat the first column as row labels.
    #[arg(long)]
    labels: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Agglomerate the rows of a numeric CSV into a dendrogram (JSON).
    Cluster {
        input: PathBuf,
        #[command(flatten)]
        opts: ClusterOpts,
        /// Emit Newick instead of JSON.
        #[arg(long)]
        newick: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Cophenetic (ultrametric) matrix of a dendrogram as CSV.
    Cophenetic {
        tree: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// List triples of a matrix CSV breaking the strong triangle inequality.
    VerifyUm {
        matrix: PathBuf,
        #[arg(long, default_value_t = um::DEFAULT_TOLERANCE)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Reorder an ultrametric matrix into canonical form.
    Canonical {
        matrix: PathBuf,
        #[arg(long, default_value_t = um::DEFAULT_TOLERANCE)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Encode a dendrogram as p-adic codes (JSON).
    PadicEncode {
        tree: PathBuf,
        #[arg(long, short, default_value_t = 3)]
        p: u64,
        /// Emit `label,integer` CSV of the evaluated codes instead.
        #[arg(long)]
        decimal: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Rebuild a dendrogram from p-adic codes; heights become ranks.
    PadicDecode {
        encoding: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Pairwise divergence level, similarity and distance of p-adic codes.
    PadicDist {
        encoding: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Pairwise Baire distances of digit strings, one per line (`label,digits`).
    BaireDist {
        input: PathBuf,
        #[command(flatten)]
        strings: BaireInput,
        #[command(flatten)]
        out: Output,
    },
    /// Prefix-trie clustering of digit strings (dendrogram JSON).
    BaireCluster {
        input: PathBuf,
        #[command(flatten)]
        strings: BaireInput,
        /// Print the prefix tree instead of the dendrogram.
        #[arg(long)]
        dump: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Encode nucleotide sequences as digit strings.
    DnaEncode {
        #[arg(long, default_value = "5-adic")]
        scheme: DnaScheme,
        #[arg(required = true)]
        sequences: Vec<String>,
    },
    /// Haar wavelet coefficients of data over its dendrogram (CSV).
    Haar {
        input: PathBuf,
        #[command(flatten)]
        opts: ClusterOpts,
        /// Use this dendrogram instead of clustering the input.
        #[arg(long)]
        tree: Option<PathBuf>,
        /// Also save the dendrogram used.
        #[arg(long)]
        save_tree: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// Reconstruct data from Haar coefficients.
    HaarInverse {
        coefficients: PathBuf,
        #[arg(long)]
        tree: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Zero small Haar details and reconstruct.
    HaarDenoise {
        coefficients: PathBuf,
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Ordinal patterns of a numeric stream.
    Ordinal {
        stream: PathBuf,
        #[arg(long, short = 'd', default_value_t = 2)]
        order: usize,
        #[arg(long, short = 't', default_value_t = 1)]
        delay: usize,
        /// Tied values: the later one ranks lower.
        #[arg(long)]
        later_lower: bool,
        /// Also list the distinct patterns with their counts.
        #[arg(long)]
        classes: bool,
    },
    /// Rank permutation of a numeric stream.
    Rankperm {
        stream: PathBuf,
        #[arg(long, short = 't', default_value_t = 1)]
        delay: usize,
    },
    /// Packed permutation of a dendrogram.
    Packed { tree: PathBuf },
    /// Dendrogram (JSON) from a packed permutation such as `(13625748)`.
    Unpack {
        permutation: String,
        #[command(flatten)]
        out: Output,
    },
    /// All non-labelled ranked dendrograms on n terminals.
    EnumerateNlr {
        n: usize,
        /// Print only the count.
        #[arg(long)]
        count: bool,
    },
    /// Set-valued dissimilarity semilattice of a 0/1 table.
    Lattice {
        table: PathBuf,
        /// Print the maximal clusters at this level instead.
        #[arg(long)]
        level: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Share of ultrametric triangles in a point cloud or matrix.
    Ultrametricity {
        input: PathBuf,
        /// The input is a dissimilarity matrix rather than points.
        #[arg(long)]
        matrix: bool,
        #[arg(long, default_value_t = um::DEFAULT_SAMPLE)]
        sample: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = um::DEFAULT_TRIANGLE_TOLERANCE)]
        tol: f64,
    },
    /// Random point cloud as CSV.
    GenCloud {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value = "uniform")]
        law: CloudLaw,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Text drawing of a dendrogram.
    Render { tree: PathBuf },
}

#[derive(Args)]
struct BaireInput {
    #[arg(long, default_value_t = 10)]
    base: u32,
    /// Lines hold decimals in [0, 1); keep this many digits of each.
    #[arg(long)]
    digitize: Option<usize>,
}

fn read(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn emit(out: &Output, text: &str) -> Result<()> {
    match &out.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display())))),
        None => Ok(io::stdout().write_all(text.as_bytes())?),
    }
}

fn read_tree(path: &Path) -> Result<Dendrogram64> {
    uio::dendrogram_from_json(&read(path)?)
}

fn cluster_table(path: &Path, opts: &ClusterOpts) -> Result<(Dendrogram64, uio::NumericTable<f64>)> {
    let table = uio::read_numeric_table::<f64>(&read(path)?, opts.labels)?;
    let d = pairwise_distances(&table.rows, opts.metric)?.with_labels(table.labels.clone())?;
    let tree = if opts.contiguous {
        agglomerate_contiguous(&d, opts.linkage)?
    } else {
        agglomerate(&d, opts.linkage)?
    };
    Ok((tree, table))
}

fn read_stream(path: &Path) -> Result<Vec<f64>> {
    let table = uio::read_numeric_table::<f64>(&read(path)?, false)?;
    Ok(table.rows.into_iter().flatten().collect())
}

fn read_strings(path: &Path, opts: &BaireInput) -> Result<Vec<BaireString>> {
    let text = read(path)?;
    let mut out = Vec::new();
    for (k, line) in text.lines().map(str::trim).enumerate() {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (label, body) = match line.split_once(',') {
            Some((l, b)) => (l.trim().to_string(), b.trim()),
            None => ((out.len() + 1).to_string(), line),
        };
        let s = match opts.digitize {
            Some(precision) => {
                let value = baire::parse_decimal(body)
                    .map_err(|e| Error::Parse { location: format!("line {}", k + 1), message: e.to_string() })?;
                baire::digitize_reals(&[value], precision, opts.base)?.remove(0)
            }
            None => BaireString::parse(opts.base, body)
                .map_err(|e| Error::Parse { location: format!("line {}", k + 1), message: e.to_string() })?,
        };
        out.push(s.with_label(label));
    }
    Ok(out)
}

fn read_encoding(path: &Path) -> Result<PadicEncoding> {
    uio::from_json::<PadicEncodingDoc>(&read(path)?)?.try_into()
}

fn reconstruct(coefficients: &Path, tree: &Path, epsilon: Option<f64>, precision: Precision) -> Result<String> {
    let tree = read_tree(tree)?;
    let labels = tree.labels().to_vec();
    let (mut t, coordinates) = uio::haar_from_csv(&read(coefficients)?, tree)?;
    if let Some(eps) = epsilon {
        t = haar_threshold(&t, eps)?;
    }
    let rows = haar_inverse(&t);
    let mut out = format!("label,{}\n", coordinates.join(","));
    for (label, row) in labels.iter().zip(rows) {
        let cells: Vec<String> = row.iter().map(|&v| uio::format_number(v, precision)).collect();
        out.push_str(&format!("{label},{}\n", cells.join(",")));
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<()> {
    let precision = if cli.full_precision { Precision::Full } else { Precision::Short };
    match cli.command {
        Command::Cluster { input, opts, newick, out } => {
            let (tree, _) = cluster_table(&input, &opts)?;
            let text = if newick { uio::to_newick(&tree, precision) } else { uio::dendrogram_to_json(&tree) };
            emit(&out, &text)
        }
        Command::Cophenetic { tree, out } => {
            let m = um::cophenetic_matrix(&read_tree(&tree)?);
            emit(&out, &uio::matrix_to_csv(&m, precision))
        }
        Command::VerifyUm { matrix, tol, out } => {
            let m = uio::read_matrix::<f64>(&read(&matrix)?)?;
            let violations = um::verify_ultrametric(&m, tol);
            emit(&out, &uio::violations_to_csv(&violations, precision))?;
            match violations.into_iter().next() {
                Some(v) => Err(v.into()),
                None => Ok(()),
            }
        }
        Command::Canonical { matrix, tol, out } => {
            let m = uio::read_matrix::<f64>(&read(&matrix)?)?;
            let (_, c) = um::canonical_form(&m, tol)?;
            emit(&out, &uio::matrix_to_csv(&c, precision))
        }
        Command::PadicEncode { tree, p, decimal, out } => {
            let enc = padic::encode_dendrogram(&read_tree(&tree)?, p)?;
            let text = if decimal {
                let mut s = String::from("label,integer\n");
                for (label, v) in enc.labels().iter().zip(enc.decimal_codes()) {
                    s.push_str(&format!("{label},{v}\n"));
                }
                s
            } else {
                uio::to_json(&PadicEncodingDoc::from(&enc))
            };
            emit(&out, &text)
        }
        Command::PadicDecode { encoding, out } => {
            let tree: Dendrogram64 = padic::decode(&read_encoding(&encoding)?)?;
            emit(&out, &uio::dendrogram_to_json(&tree))
        }
        Command::PadicDist { encoding, out } => {
            let enc = read_encoding(&encoding)?;
            let codes = enc.codes();
            let mut text = String::from("a,b,level,similarity,distance\n");
            for i in 0..codes.len() {
                for j in i + 1..codes.len() {
                    text.push_str(&format!(
                        "{},{},{},{},{}\n",
                        enc.labels()[i],
                        enc.labels()[j],
                        padic::divergence_level(&codes[i], &codes[j])?,
                        padic::padic_similarity(&codes[i], &codes[j])?,
                        padic::padic_distance(&codes[i], &codes[j])?
                    ));
                }
            }
            emit(&out, &text)
        }
        Command::BaireDist { input, strings, out } => {
            let s = read_strings(&input, &strings)?;
            let n = s.len();
            let mut values = Vec::with_capacity(n * n);
            for a in &s {
                for b in &s {
                    values.push(baire::baire_distance(a, b)?);
                }
            }
            let labels = s.iter().map(|x| x.label().unwrap_or_default().to_string()).collect();
            let m = ultrahier::DissimilarityMatrix::new(n, values)?.with_labels(labels)?;
            emit(&out, &uio::matrix_to_csv(&m, precision))
        }
        Command::BaireCluster { input, strings, dump, out } => {
            let (h, tree) = baire::baire_cluster::<f64>(&read_strings(&input, &strings)?)?;
            emit(&out, &if dump { h.dump() } else { uio::dendrogram_to_json(&tree) })
        }
        Command::DnaEncode { scheme, sequences } => {
            let mut text = String::new();
            for seq in &sequences {
                text.push_str(&format!("{}\n", baire::encode_dna(seq, scheme)?));
            }
            emit(&Output { output: None }, &text)
        }
        Command::Haar { input, opts, tree, save_tree, out } => {
            let (tree, table) = match tree {
                Some(path) => {
                    let tree = read_tree(&path)?;
                    (tree, uio::read_numeric_table::<f64>(&read(&input)?, opts.labels)?)
                }
                None => cluster_table(&input, &opts)?,
            };
            let t = haar_forward(&tree, &table.rows)?;
            if let Some(path) = save_tree {
                emit(&Output { output: Some(path) }, &uio::dendrogram_to_json(&tree))?;
            }
            let coordinates = table.columns.unwrap_or_default();
            emit(&out, &uio::haar_to_csv(&t, &coordinates, precision))
        }
        Command::HaarInverse { coefficients, tree, out } => {
            emit(&out, &reconstruct(&coefficients, &tree, None, precision)?)
        }
        Command::HaarDenoise { coefficients, tree, epsilon, out } => {
            emit(&out, &reconstruct(&coefficients, &tree, Some(epsilon), precision)?)
        }
        Command::Ordinal { stream, order, delay, later_lower, classes } => {
            let tie = if later_lower { TieRule::LaterLower } else { TieRule::EarlierLower };
            let seq = perms::ordinal_sequence(&read_stream(&stream)?, order, delay, tie)?;
            let words: Vec<String> = seq.patterns.iter().map(ToString::to_string).collect();
            let mut text = words.join(" ") + "\n";
            if classes {
                for (p, count) in &seq.classes {
                    text.push_str(&format!("{p} {count}\n"));
                }
            }
            emit(&Output { output: None }, &text)
        }
        Command::Rankperm { stream, delay } => {
            let p = perms::rank_permutation(&read_stream(&stream)?, delay)?;
            emit(&Output { output: None }, &(perms::format_permutation(&p) + "\n"))
        }
        Command::Packed { tree } => {
            let p = perms::packed_representation(&read_tree(&tree)?);
            emit(&Output { output: None }, &format!("{p}\n"))
        }
        Command::Unpack { permutation, out } => {
            let p = PackedPermutation::new(perms::parse_permutation(&permutation)?)?;
            let tree: Dendrogram64 = perms::unpack(&p)?;
            emit(&out, &uio::dendrogram_to_json(&tree))
        }
        Command::EnumerateNlr { n, count } => {
            let trees = perms::enumerate_nlr::<f64>(n)?;
            let mut text = String::new();
            if !count {
                for t in &trees {
                    text.push_str(&format!(
                        "{} {}\n",
                        perms::packed_representation(t),
                        perms::format_permutation(&perms::updown_code(t))
                    ));
                }
            }
            text.push_str(&format!("{}\n", trees.len()));
            emit(&Output { output: None }, &text)
        }
        Command::Lattice { table, level, json } => {
            let table = uio::read_boolean_table(&read(&table)?)?;
            let text = match level {
                Some(k) => {
                    let clusters = clusters_at_level(&table, k)?;
                    if json {
                        uio::to_json(&clusters)
                    } else {
                        clusters
                            .iter()
                            .map(|c| {
                                let names: Vec<&str> = c.iter().map(|&i| table.objects()[i].as_str()).collect();
                                format!("{{{}}}\n", names.join(","))
                            })
                            .collect()
                    }
                }
                None => {
                    let l = build_semilattice(&table)?;
                    if json {
                        uio::to_json(&l)
                    } else {
                        l.to_text(&table)
                    }
                }
            };
            emit(&Output { output: None }, &text)
        }
        Command::Ultrametricity { input, matrix, sample, seed, tol } => {
            let text = read(&input)?;
            let m = if matrix {
                uio::read_matrix::<f64>(&text)?
            } else {
                pairwise_distances(&uio::read_numeric_table::<f64>(&text, false)?.rows, Metric::Euclidean)?
            };
            let report = um::ultrametricity_coefficient(&m, sample, seed, tol)?;
            emit(&Output { output: None }, &uio::to_json(&report))
        }
        Command::GenCloud { n, dim, law, seed, out } => {
            let cloud = um::generate_cloud::<f64>(n, dim, law, seed)?;
            let mut text = String::new();
            for row in cloud {
                let cells: Vec<String> = row.iter().map(|&v| uio::format_number(v, precision)).collect();
                text.push_str(&(cells.join(",") + "\n"));
            }
            emit(&out, &text)
        }
        Command::Render { tree } => emit(&Output { output: None }, &render_dendrogram(&read_tree(&tree)?)),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let message = e.to_string().replace(['\n', '\r'], " ");
            eprintln!("{}: {message}", e.code());
            ExitCode::from(1)
        }
    }
}
