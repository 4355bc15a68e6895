use std::path::PathBuf;
use std::sync::Arc;

use adapara_api::{router, Config, Service};
use tracing_subscriber::EnvFilter;

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    tracing_subscriber::fmt().with_env_filter(EnvFilter::from_default_env()).init();
    let path = std::env::args().nth(1).map(PathBuf::from);
    let config = Config::load(path.as_deref(), |k| std::env::var(k).ok())?;

    let service = Arc::new(tokio::task::spawn_blocking({
        let config = config.clone();
        move || Service::from_config(&config)
    })
    .await??);
    let _trainer = service.adapt().spawn_trainer();

    let listener = tokio::net::TcpListener::bind(&config.bind).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(service, config.cors_allow_all()))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
