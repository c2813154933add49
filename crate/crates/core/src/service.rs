//! Stateless JSON service over HTTP.
//!
//! `POST /analyze {grammar, start?}` answers with the analysis report.
//! `POST /rewrite {grammar, start?}` answers with `{grammar, provenance}`, or
//! `{error, message, ..}` when the rewrite is refused.
//! `POST /parse {grammar, input, start?, lexicon?, abridged?, rewrite?, maxDepth?}`
//! answers with the parse result.
//!
//! Malformed requests, unreadable grammars and untokenizable input get a
//! 400 with `{error, message, ..}`.

use std::net::{Ipv4Addr, SocketAddr};

use axum::extract::rejection::JsonRejection;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::post;
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::analysis::analyze;
use crate::cli::{load_grammar, LoadError};
use crate::bnf::Grammar;
use crate::engine::{try_parse, ParseOptions, ParseResult, DEFAULT_MAX_DEPTH};
use crate::lexer::{LexError, Lexicon, TokenClassSpec};
use crate::rewrite::eliminate_left_recursion;
use crate::tree::{abridge, AbridgementMap};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrammarRequest {
    pub grammar: String,
    #[serde(default)]
    pub start: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ParseRequest {
    pub grammar: String,
    pub input: String,
    #[serde(default)]
    pub start: Option<String>,
    #[serde(default)]
    pub lexicon: Option<Vec<TokenClassSpec>>,
    #[serde(default)]
    pub abridged: bool,
    #[serde(default)]
    pub rewrite: bool,
    #[serde(default)]
    pub max_depth: Option<usize>,
}

fn bad_request(body: Value) -> Response {
    (StatusCode::BAD_REQUEST, Json(body)).into_response()
}

fn rejection(e: JsonRejection) -> Response {
    bad_request(json!({"error": "MalformedRequest", "message": e.body_text()}))
}

fn load_error(e: LoadError) -> Response {
    match e {
        LoadError::Syntax(e) => bad_request(json!({
            "error": "GrammarSyntax",
            "message": e.message,
            "line": e.line,
            "column": e.column,
        })),
        LoadError::Invalid(findings) => {
            let message = LoadError::Invalid(findings.clone()).to_string();
            bad_request(json!({"error": "InvalidGrammar", "message": message, "findings": findings}))
        }
    }
}

fn load(grammar: &str, start: Option<&str>) -> Result<Grammar, Box<Response>> {
    load_grammar(grammar, start).map(|(g, _)| g).map_err(|e| Box::new(load_error(e)))
}

async fn analyze_handler(request: Result<Json<GrammarRequest>, JsonRejection>) -> Response {
    let Json(request) = match request {
        Ok(request) => request,
        Err(e) => return rejection(e),
    };
    match load(&request.grammar, request.start.as_deref()) {
        Ok(grammar) => Json(analyze(&grammar)).into_response(),
        Err(response) => *response,
    }
}

async fn rewrite_handler(request: Result<Json<GrammarRequest>, JsonRejection>) -> Response {
    let Json(request) = match request {
        Ok(request) => request,
        Err(e) => return rejection(e),
    };
    let grammar = match load(&request.grammar, request.start.as_deref()) {
        Ok(grammar) => grammar,
        Err(response) => return *response,
    };
    let body = match eliminate_left_recursion(&grammar) {
        Ok(outcome) => json!({
            "grammar": outcome.grammar.to_string(),
            "provenance": outcome.provenance,
        }),
        Err(e) => {
            let mut body = serde_json::to_value(&e.kind).expect("errors serialize");
            body["message"] = Value::String(e.to_string());
            body
        }
    };
    Json(body).into_response()
}

async fn parse_handler(request: Result<Json<ParseRequest>, JsonRejection>) -> Response {
    let Json(request) = match request {
        Ok(request) => request,
        Err(e) => return rejection(e),
    };
    let mut grammar = match load(&request.grammar, request.start.as_deref()) {
        Ok(grammar) => grammar,
        Err(response) => return *response,
    };
    let mut map = None;
    if request.rewrite {
        match eliminate_left_recursion(&grammar) {
            Ok(outcome) => {
                grammar = outcome.grammar;
                map = Some(AbridgementMap::new(outcome.provenance));
            }
            Err(e) => {
                let mut body = serde_json::to_value(&e.kind).expect("errors serialize");
                body["message"] = Value::String(e.to_string());
                return bad_request(body);
            }
        }
    }
    let lexicon = match &request.lexicon {
        Some(specs) => Lexicon::from_specs(specs),
        None => Ok(Lexicon::default()),
    };
    let tokens = match lexicon.and_then(|l| l.tokenize(&request.input)) {
        Ok(tokens) => tokens,
        Err(e) => {
            let mut body = json!({"error": "LexError", "message": e.to_string()});
            if let LexError::Unrecognised { offset, .. } = e {
                body["offset"] = offset.into();
            }
            return bad_request(body);
        }
    };
    let options = ParseOptions {
        max_depth: request.max_depth.unwrap_or(DEFAULT_MAX_DEPTH),
    };
    let result = match try_parse(&grammar, &tokens, options) {
        Ok(result) => result,
        Err(e) => return bad_request(json!({"error": "InvalidPattern", "message": e.to_string()})),
    };
    let result = match result {
        ParseResult::Success { tree } if request.abridged => {
            let map = map.unwrap_or_else(|| AbridgementMap::infer(&grammar));
            ParseResult::Success {
                tree: abridge(&tree, &map),
            }
        }
        other => other,
    };
    Json(result).into_response()
}

pub fn router() -> Router {
    Router::new()
        .route("/analyze", post(analyze_handler))
        .route("/rewrite", post(rewrite_handler))
        .route("/parse", post(parse_handler))
}

/// Serves [`router`] on `127.0.0.1:port` until the process is stopped.
pub async fn serve(port: u16) -> std::io::Result<()> {
    let address = SocketAddr::from((Ipv4Addr::LOCALHOST, port));
    let listener = tokio::net::TcpListener::bind(address).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router()).await
}
