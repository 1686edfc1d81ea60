use std::fs;
use std::io::{self, IsTerminal, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use fairist_core::content_pack::BUILTIN_DOCUMENT;
use fairist_core::render::render_markdown_long;
use fairist_core::schema::parse_schema_unchecked;
use fairist_core::{
    build_report, builtin_schema, parse_schema, validate_schema, BatchAnswersFile,
    RecommendationReport, RenderFormat, SchemaError, Session, Severity, SurveySchema, Token,
};
use fairist_service::ServiceConfig;
use sha2::{Digest, Sha256};

use crate::wizard::{self, WizardEnd};

/// A command failure with its process exit code.
#[derive(Debug)]
pub enum Failure {
    /// Schema, answer or validation problems (exit 1).
    Invalid(String),
    /// Diagnostics already printed (exit 1).
    Reported,
    /// Usage or I/O problems (exit 2).
    Usage(String),
    /// The user abandoned the session (exit 130).
    Aborted,
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) | Failure::Reported => 1,
            Failure::Usage(_) => 2,
            Failure::Aborted => 130,
        }
    }

    pub fn message(&self) -> Option<&str> {
        match self {
            Failure::Invalid(m) | Failure::Usage(m) => Some(m),
            Failure::Reported => None,
            Failure::Aborted => Some("aborted, no report written"),
        }
    }
}

pub struct Output {
    pub format: RenderFormat,
    pub long: bool,
    pub path: PathBuf,
}

impl Output {
    fn render(&self, report: &RecommendationReport) -> String {
        match self.format {
            RenderFormat::Markdown if self.long => render_markdown_long(report),
            format => format.render(report),
        }
    }

    fn write(&self, report: &RecommendationReport) -> Result<(), Failure> {
        let bytes = self.render(report);
        if self.path == Path::new("-") {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(bytes.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|e| Failure::Usage(format!("writing report: {e}")))
        } else {
            fs::write(&self.path, bytes)
                .map_err(|e| Failure::Usage(format!("writing {}: {e}", self.path.display())))
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("reading {}: {e}", path.display())))
}

fn print_diagnostics(path: &Path, diagnostics: &[fairist_core::Diagnostic]) {
    for d in diagnostics {
        eprintln!("{}: {d}", path.display());
    }
}

/// Loads a schema for answering. Any invalidity is exit 1.
fn load_schema(path: Option<&Path>) -> Result<SurveySchema, Failure> {
    let Some(path) = path else {
        return Ok(builtin_schema().clone());
    };
    match parse_schema(&read(path)?) {
        Ok(schema) => Ok(schema),
        Err(SchemaError::Invalid(diagnostics)) => {
            print_diagnostics(path, &diagnostics);
            Err(Failure::Reported)
        }
        Err(e) => Err(Failure::Invalid(format!("{}: {e}", path.display()))),
    }
}

/// Token for CLI reports, derived from the final answers so that the same
/// answers always give the same report bytes.
pub fn report_token(session: &Session) -> Token {
    let answers: serde_json::Map<String, serde_json::Value> = session
        .answers
        .iter()
        .map(|(k, v)| (k.clone(), v.to_json()))
        .collect();
    let mut hasher = Sha256::new();
    hasher.update(session.schema_id.as_bytes());
    hasher.update(b"@");
    hasher.update(session.schema_version.as_bytes());
    hasher.update(b"\n");
    hasher.update(serde_json::Value::Object(answers).to_string().as_bytes());
    let digest = hasher.finalize();
    let mut bytes = [0u8; 16];
    bytes.copy_from_slice(&digest[..16]);
    Token::from_bytes(bytes)
}

fn report_for(schema: &SurveySchema, session: &Session) -> RecommendationReport {
    build_report(schema, &session.answers, report_token(session))
}

pub fn validate(path: &Path, strict: bool) -> Result<(), Failure> {
    let schema = parse_schema_unchecked(&read(path)?)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let diagnostics = validate_schema(&schema);
    print_diagnostics(path, &diagnostics);
    let errors = diagnostics
        .iter()
        .filter(|d| d.severity == Severity::Error)
        .count();
    let warnings = diagnostics.len() - errors;
    eprintln!(
        "{}: {errors} error(s), {warnings} warning(s)",
        path.display()
    );
    if errors > 0 || (strict && warnings > 0) {
        return Err(Failure::Reported);
    }
    Ok(())
}

pub fn batch(
    schema_path: Option<&Path>,
    answers_path: &Path,
    output: &Output,
) -> Result<(), Failure> {
    let schema = load_schema(schema_path)?;
    let file = BatchAnswersFile::parse(&read(answers_path)?)
        .map_err(|e| Failure::Invalid(format!("{}: {e}", answers_path.display())))?;
    let session = file
        .replay(&schema, Token::mint())
        .map_err(|e| Failure::Invalid(format!("{}: {e}", answers_path.display())))?;
    output.write(&report_for(&schema, &session))
}

pub fn wizard(
    schema_path: Option<&Path>,
    output: &Output,
    require_tty: bool,
) -> Result<(), Failure> {
    if require_tty && !io::stdin().is_terminal() {
        return Err(Failure::Usage(
            "the wizard needs an interactive terminal; use `fairist batch --answers <file>` for scripted input".into(),
        ));
    }
    let schema = load_schema(schema_path)?;
    let stdin = io::stdin().lock();
    let stderr = io::stderr().lock();
    match wizard::run(&schema, stdin, stderr) {
        Ok(WizardEnd::Finished(session)) => output.write(&report_for(&schema, &session)),
        Ok(WizardEnd::Aborted) => Err(Failure::Aborted),
        Err(e) => Err(Failure::Usage(format!("terminal I/O: {e}"))),
    }
}

pub fn serve(addr: SocketAddr, data_dir: PathBuf) -> Result<(), Failure> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info")),
        )
        .with_writer(io::stderr)
        .init();
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::Usage(e.to_string()))?;
    runtime.block_on(async {
        tokio::select! {
            result = fairist_service::serve(ServiceConfig { addr, data_dir }) => {
                result.map_err(|e| Failure::Usage(e.to_string()))
            }
            _ = tokio::signal::ctrl_c() => Ok(()),
        }
    })
}

pub fn export_builtin(path: &Path) -> Result<(), Failure> {
    if path == Path::new("-") {
        print!("{BUILTIN_DOCUMENT}");
        return Ok(());
    }
    fs::write(path, BUILTIN_DOCUMENT)
        .map_err(|e| Failure::Usage(format!("writing {}: {e}", path.display())))
}
