//! Thin async client for the rankshift HTTP service.

use rankshift_api as api;
use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("transport: {0}")]
    Transport(#[from] reqwest::Error),
    #[error("server returned {status}: {message}")]
    Api { status: u16, message: String },
}

#[derive(Debug, Clone)]
pub struct Client {
    base: String,
    http: reqwest::Client,
}

impl Client {
    /// `base` is the service root, e.g. `http://127.0.0.1:8080`.
    pub fn new(base: impl Into<String>) -> Self {
        Self {
            base: base.into().trim_end_matches('/').to_string(),
            http: reqwest::Client::new(),
        }
    }

    pub fn base_url(&self) -> &str {
        &self.base
    }

    async fn decode<T: DeserializeOwned>(
        response: reqwest::Response,
    ) -> Result<T, ClientError> {
        let status = response.status();
        if status.is_success() {
            return Ok(response.json().await?);
        }
        let message = match response.json::<api::ErrorBody>().await {
            Ok(body) => body.error,
            Err(_) => status.to_string(),
        };
        Err(ClientError::Api {
            status: status.as_u16(),
            message,
        })
    }

    async fn post<Req: Serialize, Resp: DeserializeOwned>(
        &self,
        path: &str,
        req: &Req,
    ) -> Result<Resp, ClientError> {
        let response = self
            .http
            .post(format!("{}{path}", self.base))
            .json(req)
            .send()
            .await?;
        Self::decode(response).await
    }

    async fn get<Resp: DeserializeOwned>(&self, path: &str) -> Result<Resp, ClientError> {
        let response = self.http.get(format!("{}{path}", self.base)).send().await?;
        Self::decode(response).await
    }

    pub async fn health(&self) -> Result<api::HealthResponse, ClientError> {
        self.get("/health").await
    }

    pub async fn tokenize(
        &self,
        req: &api::TokenizeRequest,
    ) -> Result<api::TokenizeResponse, ClientError> {
        self.post("/v1/tokenize", req).await
    }

    pub async fn rankfreq(
        &self,
        req: &api::RankFreqRequest,
    ) -> Result<api::RankFreqResponse, ClientError> {
        self.post("/v1/rankfreq", req).await
    }

    pub async fn fit(&self, req: &api::FitRequest) -> Result<api::FitResponse, ClientError> {
        self.post("/v1/fit", req).await
    }

    pub async fn simon(&self, req: &api::SimonRequest) -> Result<api::SimonResponse, ClientError> {
        self.post("/v1/simon", req).await
    }

    pub async fn scan(&self, req: &api::ScanRequest) -> Result<api::ScanResponse, ClientError> {
        self.post("/v1/scan", req).await
    }

    pub async fn report(
        &self,
        req: &api::ReportRequest,
    ) -> Result<api::ReportResponse, ClientError> {
        self.post("/v1/report", req).await
    }

    pub async fn corpus_run_start(
        &self,
        req: &api::CorpusRunRequest,
    ) -> Result<api::RunAccepted, ClientError> {
        self.post("/v1/corpus/runs", req).await
    }

    pub async fn corpus_run_status(&self, run_id: &str) -> Result<api::RunStatus, ClientError> {
        self.get(&format!("/v1/corpus/runs/{run_id}")).await
    }

    pub async fn corpus_run_scan(
        &self,
        run_id: &str,
    ) -> Result<api::payload::ScanResult, ClientError> {
        self.get(&format!("/v1/corpus/runs/{run_id}/scan")).await
    }

    pub async fn gen_corpus(
        &self,
        req: &api::GenCorpusRequest,
    ) -> Result<api::GenCorpusResponse, ClientError> {
        self.post("/v1/gen/corpus", req).await
    }

    pub async fn gen_text(
        &self,
        req: &api::GenTextRequest,
    ) -> Result<api::GenTextResponse, ClientError> {
        self.post("/v1/gen/text", req).await
    }
}
