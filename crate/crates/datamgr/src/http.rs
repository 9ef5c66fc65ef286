//! JSON over HTTP. The caller identifies itself with an `X-User` header
//! carrying an email address; writes without one get 401, reads without
//! one only see visible experiments.

use std::sync::Arc;

use axum::extract::{FromRequestParts, Path, Query, State};
use axum::http::header::CONTENT_TYPE;
use axum::http::request::Parts;
use axum::http::{HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, patch, post};
use axum::{Json, Router};
use chrono::{DateTime, Utc};
use iedm_core::ontology::Prefix;
use iedm_core::{Iri, LayerStack, QuantityValue};
use serde::Deserialize;
use serde_json::json;

use crate::model::*;
use crate::service::{Service, ServiceError};

pub const USER_HEADER: &str = "x-user";
pub const WARNINGS_HEADER: &str = "x-validation-warnings";

/// Anonymous readers see only visible experiments.
const ANONYMOUS: &str = "";

pub struct ApiError(ServiceError);

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        ApiError(e)
    }
}

fn error_body(kind: &str, message: String) -> serde_json::Value {
    json!({ "error": kind, "message": message })
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let message = self.0.to_string();
        let (status, body) = match self.0 {
            ServiceError::NotFound(_) => (StatusCode::NOT_FOUND, error_body("NotFound", message)),
            ServiceError::UnknownExperiment(_) => {
                (StatusCode::UNPROCESSABLE_ENTITY, error_body("UnknownExperiment", message))
            }
            ServiceError::UnknownField(_) => (StatusCode::UNPROCESSABLE_ENTITY, error_body("UnknownField", message)),
            ServiceError::Validation(_) => (StatusCode::UNPROCESSABLE_ENTITY, error_body("ValidationError", message)),
            ServiceError::VersionConflict { expected, actual, .. } => (
                StatusCode::CONFLICT,
                json!({ "error": "VersionConflict", "message": message, "expected": expected, "actual": actual }),
            ),
            ServiceError::Forbidden(_) => (StatusCode::FORBIDDEN, error_body("Forbidden", message)),
            ServiceError::TemporalOrder { .. } => {
                (StatusCode::UNPROCESSABLE_ENTITY, error_body("TemporalOrder", message))
            }
            ServiceError::ExportInvalid { report, .. } => (
                StatusCode::UNPROCESSABLE_ENTITY,
                json!({ "error": "ExportInvalid", "message": message, "report": report }),
            ),
            ServiceError::ImportInvalid { report } => (
                StatusCode::UNPROCESSABLE_ENTITY,
                json!({ "error": "ImportInvalid", "message": message, "report": report }),
            ),
            ServiceError::Rdf(_) => (StatusCode::BAD_REQUEST, error_body("SyntaxError", message)),
            ServiceError::Store(_) => (StatusCode::INTERNAL_SERVER_ERROR, error_body("StoreError", message)),
        };
        (status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

/// The authenticated caller.
pub struct User(pub String);

/// The caller, if any.
pub struct MaybeUser(pub Option<String>);

impl<S: Send + Sync> FromRequestParts<S> for MaybeUser {
    type Rejection = Response;

    async fn from_request_parts(parts: &mut Parts, _: &S) -> Result<Self, Self::Rejection> {
        match parts.headers.get(USER_HEADER) {
            None => Ok(MaybeUser(None)),
            Some(v) => match v.to_str() {
                Ok(s) if !s.trim().is_empty() => Ok(MaybeUser(Some(s.trim().to_string()))),
                _ => Err((
                    StatusCode::BAD_REQUEST,
                    Json(error_body("BadUser", "X-User must be a non-empty email".into())),
                )
                    .into_response()),
            },
        }
    }
}

impl<S: Send + Sync> FromRequestParts<S> for User {
    type Rejection = Response;

    async fn from_request_parts(parts: &mut Parts, state: &S) -> Result<Self, Self::Rejection> {
        match MaybeUser::from_request_parts(parts, state).await? {
            MaybeUser(Some(u)) => Ok(User(u)),
            MaybeUser(None) => Err((
                StatusCode::UNAUTHORIZED,
                Json(error_body("Unauthenticated", "missing X-User header".into())),
            )
                .into_response()),
        }
    }
}

impl MaybeUser {
    fn name(&self) -> &str {
        self.0.as_deref().unwrap_or(ANONYMOUS)
    }
}

type AppState = Arc<Service>;

pub fn router(svc: Arc<Service>) -> Router {
    Router::new()
        .route("/samples", get(list_samples).post(create_sample))
        .route("/samples/{id}", get(get_sample).patch(update_sample))
        .route("/samples/{id}/refresh", post(no_op))
        .route("/samples/{id}/map", get(no_op))
        .route("/experiments", get(list_experiments).post(create_experiment))
        .route("/experiments/{id}", get(get_experiment))
        .route("/experiments/{id}/visibility", patch(set_visibility))
        .route("/experiments/{id}/irradiations", post(register_irradiation))
        .route("/experiments/{id}/irradiations/{rid}/complete", post(complete_irradiation))
        .route("/experiments/{id}/export.ttl", get(export_turtle))
        .route("/experiments/{id}/export", get(export_json))
        .route("/validate", post(validate))
        .route("/formschema/{class}", get(formschema))
        .route("/occupancy", get(occupancy).post(occupancy))
        .route("/fields", get(list_fields).post(register_field))
        .route("/roles", get(list_roles).post(assign_role))
        .with_state(svc)
}

async fn list_samples(
    State(svc): State<AppState>,
    user: MaybeUser,
    Query(q): Query<SampleQuery>,
) -> ApiResult<Json<Page<SampleRecord>>> {
    Ok(Json(svc.list_samples(&q, user.name())?))
}

async fn create_sample(
    State(svc): State<AppState>,
    User(user): User,
    Json(req): Json<NewSample>,
) -> ApiResult<(StatusCode, Json<SampleRecord>)> {
    Ok((StatusCode::CREATED, Json(svc.create_sample(req, &user)?)))
}

async fn get_sample(State(svc): State<AppState>, user: MaybeUser, Path(id): Path<String>) -> ApiResult<Json<SampleRecord>> {
    Ok(Json(svc.get_sample(&id, user.name())?))
}

#[derive(Deserialize)]
struct VersionedPatch {
    version: u64,
    #[serde(flatten)]
    patch: SamplePatch,
}

async fn update_sample(
    State(svc): State<AppState>,
    User(user): User,
    Path(id): Path<String>,
    Json(body): Json<VersionedPatch>,
) -> ApiResult<Json<SampleRecord>> {
    Ok(Json(svc.update_sample(&id, body.patch, &user, body.version)?))
}

/// Placeholder for the listing's Refresh and Map actions.
async fn no_op(Path(_id): Path<String>) -> StatusCode {
    StatusCode::NO_CONTENT
}

async fn list_experiments(State(svc): State<AppState>, user: MaybeUser) -> Json<Vec<ExperimentRecord>> {
    Json(svc.list_experiments(user.name()))
}

async fn create_experiment(
    State(svc): State<AppState>,
    User(user): User,
    Json(req): Json<NewExperiment>,
) -> ApiResult<(StatusCode, Json<ExperimentRecord>)> {
    Ok((StatusCode::CREATED, Json(svc.create_experiment(req, &user)?)))
}

async fn get_experiment(
    State(svc): State<AppState>,
    user: MaybeUser,
    Path(id): Path<String>,
) -> ApiResult<Json<ExperimentRecord>> {
    Ok(Json(svc.get_experiment(&id, user.name())?))
}

#[derive(Deserialize)]
struct Visibility {
    visible: bool,
}

async fn set_visibility(
    State(svc): State<AppState>,
    User(user): User,
    Path(id): Path<String>,
    Json(v): Json<Visibility>,
) -> ApiResult<Json<ExperimentRecord>> {
    Ok(Json(svc.set_visibility(&id, v.visible, &user)?))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct Registration {
    dut_id: String,
    radiation_field: Iri,
    start: DateTime<Utc>,
}

async fn register_irradiation(
    State(svc): State<AppState>,
    User(user): User,
    Path(id): Path<String>,
    Json(r): Json<Registration>,
) -> ApiResult<(StatusCode, Json<DutIrradiationRecord>)> {
    let rec = svc.register_dut_irradiation(&id, &r.dut_id, &r.radiation_field, r.start, &user)?;
    Ok((StatusCode::CREATED, Json(rec)))
}

#[derive(Deserialize)]
struct Completion {
    end: DateTime<Utc>,
    #[serde(default)]
    cumulated: Option<QuantityValue>,
}

async fn complete_irradiation(
    State(svc): State<AppState>,
    User(user): User,
    Path((id, rid)): Path<(String, String)>,
    Json(c): Json<Completion>,
) -> ApiResult<Json<DutIrradiationRecord>> {
    Ok(Json(svc.complete_dut_irradiation(&id, &rid, c.end, c.cumulated, &user)?))
}

async fn export_turtle(State(svc): State<AppState>, user: MaybeUser, Path(id): Path<String>) -> ApiResult<Response> {
    let export = svc.export_experiment(&id, Some(user.name()))?;
    let mut resp = export.turtle.into_response();
    let headers = resp.headers_mut();
    headers.insert(CONTENT_TYPE, HeaderValue::from_static("text/turtle; charset=utf-8"));
    headers.insert(WARNINGS_HEADER, HeaderValue::from(export.warnings.len()));
    Ok(resp)
}

async fn export_json(
    State(svc): State<AppState>,
    user: MaybeUser,
    Path(id): Path<String>,
) -> ApiResult<Json<crate::service::Export>> {
    Ok(Json(svc.export_experiment(&id, Some(user.name()))?))
}

#[derive(Deserialize)]
struct ValidateParams {
    #[serde(default)]
    draft: bool,
}

async fn validate(
    State(svc): State<AppState>,
    Query(p): Query<ValidateParams>,
    body: String,
) -> ApiResult<Json<crate::service::ValidationOutcome>> {
    Ok(Json(svc.validate_turtle(&body, p.draft)?))
}

/// Accepts `iedm:DUT`, another registered prefix, or a bare iedm local name.
fn class_iri(text: &str) -> Result<Iri, ServiceError> {
    let parsed = if text.contains(':') {
        text.parse()
    } else {
        Iri::new(Prefix::Iedm, text)
    };
    parsed.map_err(|e| ServiceError::Validation(e.to_string()))
}

async fn formschema(
    State(svc): State<AppState>,
    Path(class): Path<String>,
) -> ApiResult<Json<iedm_core::formgen::FormSchema>> {
    Ok(Json(svc.form_schema(&class_iri(&class)?)?))
}

#[derive(Deserialize)]
struct LayersBody {
    layers: Vec<LayerSpec>,
}

/// Body is either `{"layers": [...]}` JSON or a stack file in text form.
async fn occupancy(
    State(svc): State<AppState>,
    headers: HeaderMap,
    body: String,
) -> ApiResult<Json<crate::service::OccupancyResult>> {
    let is_json = headers
        .get(CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.starts_with("application/json"));
    let stack = if is_json {
        let body: LayersBody =
            serde_json::from_str(&body).map_err(|e| ServiceError::Validation(e.to_string()))?;
        svc.stack(&body.layers)?
    } else {
        LayerStack::parse(&body, svc.materials()).map_err(ServiceError::from)?
    };
    Ok(Json(svc.occupancy(&stack)?))
}

async fn list_fields(State(svc): State<AppState>) -> Json<Vec<FieldEntry>> {
    Json(svc.fields())
}

async fn register_field(
    State(svc): State<AppState>,
    User(_): User,
    Json(f): Json<FieldEntry>,
) -> ApiResult<(StatusCode, Json<FieldEntry>)> {
    Ok((StatusCode::CREATED, Json(svc.register_field(f)?)))
}

async fn list_roles(State(svc): State<AppState>) -> Json<Vec<RoleAssignment>> {
    Json(svc.roles())
}

async fn assign_role(
    State(svc): State<AppState>,
    User(_): User,
    Json(a): Json<RoleAssignment>,
) -> ApiResult<StatusCode> {
    svc.assign_role(a.facility, &a.user, a.role)?;
    Ok(StatusCode::NO_CONTENT)
}
