use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use fairist_core::content_pack::{builtin_schema, BUILTIN_DOCUMENT};
use fairist_core::{serialize_schema, Session, SessionStore, SurveySchema};

use crate::error::ApiError;

/// A schema together with the document text published for it.
#[derive(Debug, Clone)]
pub struct PublishedSchema {
    pub schema: Arc<SurveySchema>,
    pub document: String,
}

#[derive(Debug, Clone, Default)]
pub struct SchemaRegistry {
    by_id: BTreeMap<String, PublishedSchema>,
}

impl SchemaRegistry {
    pub fn builtin() -> Self {
        let mut registry = Self::default();
        registry.by_id.insert(
            builtin_schema().id.clone(),
            PublishedSchema {
                schema: Arc::new(builtin_schema().clone()),
                document: BUILTIN_DOCUMENT.to_owned(),
            },
        );
        registry
    }

    /// Adds or replaces a schema. The caller is responsible for validating it.
    pub fn insert(&mut self, schema: SurveySchema) {
        let document = serialize_schema(&schema);
        self.by_id.insert(
            schema.id.clone(),
            PublishedSchema {
                schema: Arc::new(schema),
                document,
            },
        );
    }

    pub fn get(&self, id: &str) -> Option<&PublishedSchema> {
        self.by_id.get(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &PublishedSchema> {
        self.by_id.values()
    }

    /// The schema a stored session was started against.
    pub fn for_session(&self, session: &Session) -> Result<Arc<SurveySchema>, ApiError> {
        self.get(&session.schema_id)
            .filter(|p| p.schema.version == session.schema_version)
            .map(|p| p.schema.clone())
            .ok_or_else(|| {
                ApiError::internal(format!(
                    "schema {}@{} is no longer published",
                    session.schema_id, session.schema_version
                ))
            })
    }
}

/// Per-token mutual exclusion. Entries are dropped once nobody holds them.
#[derive(Debug, Default)]
pub struct TokenLocks {
    inner: Mutex<HashMap<String, Arc<Mutex<()>>>>,
}

impl TokenLocks {
    pub fn with<R>(&self, token: &str, f: impl FnOnce() -> R) -> R {
        let lock = {
            let mut map = self.inner.lock().expect("lock map poisoned");
            map.entry(token.to_owned()).or_default().clone()
        };
        let result = {
            let _guard = lock.lock().unwrap_or_else(|p| p.into_inner());
            f()
        };
        let mut map = self.inner.lock().expect("lock map poisoned");
        // the map and our clone: nobody else is waiting
        if Arc::strong_count(&lock) == 2 {
            map.remove(token);
        }
        result
    }

    pub fn len(&self) -> usize {
        self.inner.lock().expect("lock map poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub struct AppState {
    pub store: SessionStore,
    pub schemas: SchemaRegistry,
    pub locks: TokenLocks,
}

impl AppState {
    pub fn new(store: SessionStore, schemas: SchemaRegistry) -> Self {
        Self {
            store,
            schemas,
            locks: TokenLocks::default(),
        }
    }

    /// Loads, mutates and saves one session while holding its token's lock.
    pub fn mutate<R>(
        &self,
        token: &str,
        f: impl FnOnce(&mut Session, &SurveySchema) -> Result<R, ApiError>,
    ) -> Result<(Session, R), ApiError> {
        self.locks.with(token, || {
            let mut session = self.store.load(token)?;
            let schema = self.schemas.for_session(&session)?;
            let out = f(&mut session, &schema)?;
            self.store.save(&session)?;
            Ok((session, out))
        })
    }

    pub fn load(&self, token: &str) -> Result<(Session, Arc<SurveySchema>), ApiError> {
        let session = self.store.load(token)?;
        let schema = self.schemas.for_session(&session)?;
        Ok((session, schema))
    }
}
