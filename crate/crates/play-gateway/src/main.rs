use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use clap::Parser;
use multideal::scenario::load_scenario_dir;
use play_gateway::{router, SessionManager};

#[derive(Parser)]
#[command(name = "play-gateway", version, about = "Serve live negotiation sessions")]
struct Cli {
    #[arg(long, env = "PLAY_GATEWAY_BIND", default_value = "127.0.0.1")]
    bind: std::net::IpAddr,
    #[arg(long, env = "PLAY_GATEWAY_PORT", default_value_t = 8080)]
    port: u16,
    /// Seconds of inactivity before a session is dropped.
    #[arg(long, env = "PLAY_GATEWAY_TTL_SECS", default_value_t = 1800)]
    ttl_secs: u64,
    /// Extra scenario files served alongside the built-in templates.
    #[arg(long, env = "PLAY_GATEWAY_TEMPLATE_DIR")]
    template_dir: Option<PathBuf>,
}

#[tokio::main]
async fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let extra = match &cli.template_dir {
        Some(dir) => match load_scenario_dir(dir) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("play-gateway: {}: {e}", dir.display());
                std::process::exit(2);
            }
        },
        None => Vec::new(),
    };
    let ttl = Duration::from_secs(cli.ttl_secs);
    let manager = Arc::new(SessionManager::new(extra, ttl));

    let sweeper = Arc::clone(&manager);
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(ttl.min(Duration::from_secs(60)).max(Duration::from_secs(1)));
        loop {
            tick.tick().await;
            let n = sweeper.purge_expired();
            if n > 0 {
                log::info!("expired {n} idle sessions");
            }
        }
    });

    let addr = SocketAddr::new(cli.bind, cli.port);
    let listener = match tokio::net::TcpListener::bind(addr).await {
        Ok(l) => l,
        Err(e) => {
            eprintln!("play-gateway: cannot bind {addr}: {e}");
            std::process::exit(3);
        }
    };
    log::info!("listening on {addr}");
    let shutdown = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    if let Err(e) = axum::serve(listener, router(manager)).with_graceful_shutdown(shutdown).await {
        eprintln!("play-gateway: {e}");
        std::process::exit(1);
    }
}
