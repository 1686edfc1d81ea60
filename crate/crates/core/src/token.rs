//! Unguessable session tokens: 128 random bits as 22 URL-safe characters.

use std::fmt;
use std::str::FromStr;

use base64::engine::general_purpose::URL_SAFE_NO_PAD;
use base64::Engine;
use rand::rngs::OsRng;
use rand::TryRngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const TOKEN_LEN: usize = 22;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Token(String);

#[derive(Debug, Error)]
pub enum TokenError {
    #[error("malformed token")]
    Malformed,
    #[error("entropy source unavailable: {0}")]
    Entropy(String),
}

impl Token {
    /// Draws 16 bytes from the operating system's CSPRNG.
    pub fn try_mint() -> Result<Token, TokenError> {
        let mut bytes = [0u8; 16];
        OsRng
            .try_fill_bytes(&mut bytes)
            .map_err(|e| TokenError::Entropy(e.to_string()))?;
        Ok(Token::from_bytes(bytes))
    }

    /// Panics if the OS entropy source fails; there is no safe fallback.
    pub fn mint() -> Token {
        Token::try_mint().expect("OS entropy source unavailable")
    }

    pub fn from_bytes(bytes: [u8; 16]) -> Token {
        Token(URL_SAFE_NO_PAD.encode(bytes))
    }

    pub fn parse(s: &str) -> Result<Token, TokenError> {
        if is_token_text(s) {
            Ok(Token(s.to_owned()))
        } else {
            Err(TokenError::Malformed)
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

/// `^[A-Za-z0-9_-]{22}$`
pub fn is_token_text(s: &str) -> bool {
    s.len() == TOKEN_LEN
        && s.bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-')
}

impl FromStr for Token {
    type Err = TokenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Token::parse(s)
    }
}

impl TryFrom<String> for Token {
    type Error = TokenError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        if is_token_text(&s) {
            Ok(Token(s))
        } else {
            Err(TokenError::Malformed)
        }
    }
}

impl From<Token> for String {
    fn from(t: Token) -> String {
        t.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minted_tokens_are_well_formed_and_distinct() {
        let a = Token::mint();
        let b = Token::mint();
        assert!(is_token_text(a.as_str()));
        assert_ne!(a, b);
    }

    #[test]
    fn parse_rejects_wrong_alphabet_and_length() {
        assert!(Token::parse("AAAAAAAAAAAAAAAAAAAAAA").is_ok());
        assert!(Token::parse("AAAAAAAAAAAAAAAAAAAAA").is_err());
        assert!(Token::parse("AAAAAAAAAAAAAAAAAAAAA/").is_err());
        assert!(Token::parse("../../../../etc/passwd").is_err());
    }

    #[test]
    fn serde_validates() {
        assert!(serde_json::from_str::<Token>("\"short\"").is_err());
        let t = Token::from_bytes([7; 16]);
        let text = serde_json::to_string(&t).unwrap();
        assert_eq!(serde_json::from_str::<Token>(&text).unwrap(), t);
    }
}
