use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use genotag::constraints::parse_rule_file;
use genotag::error::Error;
use genotag::eval::{ambiguity_profile, genotype_growth, parse_tagged, score};
use genotag::morphology::{AnalyzerOptions, Lexicon, ProperNounDict, SuffixRules};
use genotag::pipeline::{self, PipelineOptions, Resources, Schedule, Step};
use genotag::preprocess::{self, PreprocessOptions};
use genotag::stats::{read_gold_corpus, train, Model};
use genotag::synth::{gold_to_text, SynthProcess};
use genotag::tag::{Genotype, Tag, TagsetMap};

const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (model format v1)");

#[derive(Parser)]
#[command(name = "genotag", version = VERSION, about = "Genotype-based part-of-speech disambiguation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct PreprocessArgs {
    /// Abbreviation list (one entry per line) overriding the built-in one
    #[arg(long)]
    abbrev: Option<PathBuf>,
    /// Clitic pronoun list overriding the built-in one
    #[arg(long)]
    clitics: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzerArgs {
    /// Open-class guess genotype for unknown words, e.g. "NFS NMS JFS JMS V"
    #[arg(long)]
    guess_tags: Option<String>,
    /// Tag for proper nouns and acronyms
    #[arg(long, default_value = "U")]
    proper_noun_tag: String,
    /// Tag for punctuation missing from the lexicon
    #[arg(long, default_value = ".")]
    punctuation_tag: String,
    /// Optional suffix-guess rule file (off unless given)
    #[arg(long)]
    suffix_rules: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Tokenize raw text into a sentence-delimited token stream
    Tokenize {
        input: PathBuf,
        /// Lexicon supplying multiword entries for compound joining
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[command(flatten)]
        pre: PreprocessArgs,
    },
    /// Tokenize and run morphological analysis only
    Analyze {
        input: PathBuf,
        #[arg(long)]
        lexicon: PathBuf,
        #[command(flatten)]
        pre: PreprocessArgs,
        #[command(flatten)]
        analyzer: AnalyzerArgs,
    },
    /// Train decision tables from a hand-tagged corpus
    Train {
        corpus: PathBuf,
        #[arg(long)]
        lexicon: PathBuf,
        /// Output model file
        #[arg(long)]
        model: PathBuf,
        /// Also write the proper nouns learned from the corpus
        #[arg(long)]
        proper_nouns_out: Option<PathBuf>,
        #[command(flatten)]
        analyzer: AnalyzerArgs,
    },
    /// Run the full disambiguation pipeline over raw text
    Tag {
        input: PathBuf,
        #[arg(long)]
        lexicon: PathBuf,
        /// Negative rule file (needed by D steps)
        #[arg(long)]
        rules: Option<PathBuf>,
        /// Trained model (needed by T3/B/U steps)
        #[arg(long)]
        model: Option<PathBuf>,
        /// Tagset map (needed by the R step)
        #[arg(long)]
        tagset_map: Option<PathBuf>,
        /// Step sequence, e.g. M,D:3,B,U:90,R
        #[arg(long, default_value = "M")]
        schedule: String,
        /// Override the iteration count of every D step
        #[arg(long)]
        iterations: Option<usize>,
        /// Write one line per constraint firing
        #[arg(long)]
        rule_log: Option<PathBuf>,
        #[arg(long, default_value_t = pipeline::DEFAULT_BIGRAM_THRESHOLD)]
        bigram_threshold: f64,
        #[arg(long, default_value_t = pipeline::DEFAULT_TRIGRAM_THRESHOLD)]
        trigram_threshold: f64,
        /// Worker threads; 1 keeps byte-stable single-threaded processing
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Proper nouns learned at training time
        #[arg(long)]
        proper_nouns: Option<PathBuf>,
        /// Write the proper nouns known after this run
        #[arg(long)]
        proper_nouns_out: Option<PathBuf>,
        #[command(flatten)]
        pre: PreprocessArgs,
        #[command(flatten)]
        analyzer: AnalyzerArgs,
    },
    /// Score tagged output against a gold corpus
    Eval {
        gold: PathBuf,
        system: PathBuf,
        /// Machine-readable two-line TSV instead of the aligned report
        #[arg(long)]
        tsv: bool,
    },
    /// Ambiguity profile and genotype growth of a raw-text corpus
    Stats {
        corpus: PathBuf,
        #[arg(long)]
        lexicon: PathBuf,
        /// Growth checkpoints as comma-separated token counts
        #[arg(long)]
        checkpoints: Option<String>,
        #[command(flatten)]
        pre: PreprocessArgs,
        #[command(flatten)]
        analyzer: AnalyzerArgs,
    },
    /// Generate a synthetic toy corpus for property testing
    SeedCorpus {
        #[arg(long, default_value_t = 100)]
        sentences: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Gold corpus output (token<TAB>tag lines)
        #[arg(long)]
        out_corpus: PathBuf,
        /// Matching toy lexicon
        #[arg(long)]
        out_lexicon: Option<PathBuf>,
        /// Negative rules implied by the generating process
        #[arg(long)]
        out_rules: Option<PathBuf>,
        /// Raw text form, one sentence per paragraph
        #[arg(long)]
        out_text: Option<PathBuf>,
    },
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn data(message: impl Into<String>) -> CliError {
        CliError {
            code: 1,
            message: message.into(),
        }
    }

    fn io(message: impl Into<String>) -> CliError {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> CliError {
        let code = match err {
            Error::Io { .. } => 2,
            _ => 1,
        };
        CliError {
            code,
            message: err.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("genotag: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn require_inputs(paths: &[Option<&PathBuf>]) -> Result<(), CliError> {
    for path in paths.iter().flatten() {
        if !path.exists() {
            return Err(CliError::io(format!("{}: no such file", path.display())));
        }
    }
    Ok(())
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

fn preprocess_options(args: &PreprocessArgs) -> Result<PreprocessOptions, CliError> {
    let mut opts = PreprocessOptions::default();
    if let Some(path) = &args.abbrev {
        opts.abbreviations = preprocess::load_word_list(path)?;
    }
    if let Some(path) = &args.clitics {
        opts.clitic_pronouns = preprocess::load_word_list(path)?.into_iter().collect();
    }
    Ok(opts)
}

fn analyzer_options(args: &AnalyzerArgs) -> Result<AnalyzerOptions, CliError> {
    let mut opts = AnalyzerOptions::default();
    opts.proper_noun_tag =
        Tag::parse(&args.proper_noun_tag).map_err(|e| CliError::data(e.to_string()))?;
    opts.punctuation_tag =
        Tag::parse(&args.punctuation_tag).map_err(|e| CliError::data(e.to_string()))?;
    if let Some(tags) = &args.guess_tags {
        let listed = tags.replace(',', " ");
        opts.guess_genotype =
            Genotype::parse_list(&listed).map_err(|e| CliError::data(e.to_string()))?;
    }
    if let Some(path) = &args.suffix_rules {
        opts.suffix_rules = Some(SuffixRules::load(path)?);
    }
    Ok(opts)
}

fn compounds_of(lexicon: Option<&Lexicon>) -> BTreeSet<String> {
    lexicon
        .map(|l| l.compound_keys().clone())
        .unwrap_or_default()
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Tokenize { input, lexicon, pre } => {
            require_inputs(&[
                Some(&input),
                lexicon.as_ref(),
                pre.abbrev.as_ref(),
                pre.clitics.as_ref(),
            ])?;
            let opts = preprocess_options(&pre)?;
            let lexicon = lexicon.map(|p| Lexicon::load(&p)).transpose()?;
            let text = read_text(&input)?;
            let sentences = preprocess::preprocess(&text, &opts, &compounds_of(lexicon.as_ref()));
            print!("{}", preprocess::to_token_stream(&sentences));
            Ok(())
        }
        Command::Analyze {
            input,
            lexicon,
            pre,
            analyzer,
        } => {
            require_inputs(&[
                Some(&input),
                Some(&lexicon),
                pre.abbrev.as_ref(),
                pre.clitics.as_ref(),
                analyzer.suffix_rules.as_ref(),
            ])?;
            let lexicon = Lexicon::load(&lexicon)?;
            let pre_opts = preprocess_options(&pre)?;
            let options = PipelineOptions {
                analyzer: analyzer_options(&analyzer)?,
                ..PipelineOptions::default()
            };
            let text = read_text(&input)?;
            let sentences = preprocess::preprocess(&text, &pre_opts, lexicon.compound_keys());
            let schedule = Schedule::parse("M")?;
            let tagged = pipeline::run(&sentences, &schedule, &Resources::new(&lexicon), &options)?;
            print!("{}", pipeline::write_tagged(&tagged));
            Ok(())
        }
        Command::Train {
            corpus,
            lexicon,
            model,
            proper_nouns_out,
            analyzer,
        } => {
            require_inputs(&[
                Some(&corpus),
                Some(&lexicon),
                analyzer.suffix_rules.as_ref(),
            ])?;
            let lexicon = Lexicon::load(&lexicon)?;
            let analyzer = analyzer_options(&analyzer)?;
            let gold = read_gold_corpus(&corpus)?;
            let outcome = train(&gold, &lexicon, &analyzer);
            for w in &outcome.warnings {
                eprintln!(
                    "warning: sentence {} token {}: gold tag {} not in genotype [{}] of {:?}; skipped",
                    w.sentence_index + 1,
                    w.token_index + 1,
                    w.gold,
                    w.genotype,
                    w.surface
                );
            }
            outcome.model.save(&model)?;
            if let Some(path) = proper_nouns_out {
                outcome.proper_nouns.save(&path)?;
            }
            println!("unigram rows  {}", outcome.model.unigram.len());
            println!("bigram rows   {}", outcome.model.bigram.len());
            println!("trigram rows  {}", outcome.model.trigram.len());
            Ok(())
        }
        Command::Tag {
            input,
            lexicon,
            rules,
            model,
            tagset_map,
            schedule,
            iterations,
            rule_log,
            bigram_threshold,
            trigram_threshold,
            jobs,
            proper_nouns,
            proper_nouns_out,
            pre,
            analyzer,
        } => {
            require_inputs(&[
                Some(&input),
                Some(&lexicon),
                rules.as_ref(),
                model.as_ref(),
                tagset_map.as_ref(),
                proper_nouns.as_ref(),
                pre.abbrev.as_ref(),
                pre.clitics.as_ref(),
                analyzer.suffix_rules.as_ref(),
            ])?;
            let lexicon = Lexicon::load(&lexicon)?;
            let rules = rules.map(|p| parse_rule_file(&p)).transpose()?;
            let model = model.map(|p| Model::load(&p)).transpose()?;
            let tagset_map = tagset_map.map(|p| TagsetMap::load(&p)).transpose()?;
            let learned = proper_nouns
                .map(|p| ProperNounDict::load(&p))
                .transpose()?;

            let mut schedule = Schedule::parse(&schedule)?;
            if let Some(n) = iterations {
                if n == 0 {
                    return Err(CliError::data("--iterations must be at least 1"));
                }
                let steps = schedule
                    .steps()
                    .iter()
                    .map(|s| match s {
                        Step::Constraints { .. } => Step::Constraints { iterations: n },
                        other => other.clone(),
                    })
                    .collect();
                schedule = Schedule::new(steps)?;
            }

            let pre_opts = preprocess_options(&pre)?;
            let options = PipelineOptions {
                analyzer: analyzer_options(&analyzer)?,
                bigram_threshold,
                trigram_threshold,
                jobs,
                two_pass_proper_nouns: jobs > 1,
            };
            let resources = Resources {
                lexicon: &lexicon,
                rules: rules.as_deref(),
                model: model.as_ref(),
                tagset_map: tagset_map.as_ref(),
                learned_proper_nouns: learned.as_ref(),
            };
            let text = read_text(&input)?;
            let sentences = preprocess::preprocess(&text, &pre_opts, lexicon.compound_keys());
            let (tagged, log) = pipeline::run_with_log(&sentences, &schedule, &resources, &options)?;
            if let Some(path) = rule_log {
                let mut out = String::new();
                for (sentence, event) in &log.constraint_events {
                    let removed = event
                        .removed
                        .as_ref()
                        .map(|t| t.to_string())
                        .unwrap_or_else(|| "(blocked)".to_string());
                    out.push_str(&format!(
                        "{}\t{}\t{}\t{}\n",
                        event.rule_id, sentence, event.token_index, removed
                    ));
                }
                write_text(&path, &out)?;
            }
            if let Some(path) = proper_nouns_out {
                let mut all = log.discovered_proper_nouns.clone();
                if let Some(learned) = &learned {
                    for name in learned.iter() {
                        all.insert(name);
                    }
                }
                all.save(&path)?;
            }
            print!("{}", pipeline::write_tagged(&tagged));
            Ok(())
        }
        Command::Eval { gold, system, tsv } => {
            require_inputs(&[Some(&gold), Some(&system)])?;
            let gold_corpus = read_gold_corpus(&gold)?;
            let system_text = read_text(&system)?;
            let system_corpus = parse_tagged(&system_text, &system.display().to_string())?;
            let report = score(&system_corpus, &gold_corpus)?;
            if tsv {
                print!("{}", report.to_tsv());
            } else {
                println!("{report}");
            }
            Ok(())
        }
        Command::Stats {
            corpus,
            lexicon,
            checkpoints,
            pre,
            analyzer,
        } => {
            require_inputs(&[
                Some(&corpus),
                Some(&lexicon),
                pre.abbrev.as_ref(),
                pre.clitics.as_ref(),
                analyzer.suffix_rules.as_ref(),
            ])?;
            let lexicon = Lexicon::load(&lexicon)?;
            let pre_opts = preprocess_options(&pre)?;
            let options = PipelineOptions {
                analyzer: analyzer_options(&analyzer)?,
                ..PipelineOptions::default()
            };
            let text = read_text(&corpus)?;
            let sentences = preprocess::preprocess(&text, &pre_opts, lexicon.compound_keys());
            let schedule = Schedule::parse("M")?;
            let analyzed =
                pipeline::run(&sentences, &schedule, &Resources::new(&lexicon), &options)?;

            let profile = ambiguity_profile(&analyzed);
            println!("{profile}");

            let total: usize = analyzed
                .iter()
                .flatten()
                .filter(|t| !t.is_marker())
                .count();
            let marks: Vec<usize> = match checkpoints {
                Some(list) => list
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<usize>()
                            .map_err(|_| CliError::data(format!("bad checkpoint {s:?}")))
                    })
                    .collect::<Result<Vec<_>, _>>()?,
                None => [total / 4, total / 2, total * 3 / 4, total]
                    .into_iter()
                    .filter(|&n| n > 0)
                    .collect(),
            };
            let growth = genotype_growth(&analyzed, &marks);
            println!();
            println!("tokens\twords\tgenotypes");
            for point in growth {
                println!(
                    "{}\t{}\t{}",
                    point.tokens, point.distinct_words, point.distinct_genotypes
                );
            }
            Ok(())
        }
        Command::SeedCorpus {
            sentences,
            seed,
            out_corpus,
            out_lexicon,
            out_rules,
            out_text,
        } => {
            let process = SynthProcess::toy();
            let corpus = process.generate(sentences, seed);
            write_text(&out_corpus, &gold_to_text(&corpus))?;
            if let Some(path) = out_lexicon {
                let mut text = String::new();
                for (surface, genotype) in process.words() {
                    text.push_str(&format!("{surface}\t{genotype}\n"));
                }
                write_text(&path, &text)?;
            }
            if let Some(path) = out_rules {
                write_text(&path, &process.negative_rules_text())?;
            }
            if let Some(path) = out_text {
                let mut text = String::new();
                for (i, sentence) in corpus.iter().enumerate() {
                    if i > 0 {
                        text.push('\n');
                    }
                    let words: Vec<&str> =
                        sentence.iter().map(|t| t.surface.as_str()).collect();
                    text.push_str(&words.join(" "));
                    text.push('\n');
                }
                write_text(&path, &text)?;
            }
            Ok(())
        }
    }
}
