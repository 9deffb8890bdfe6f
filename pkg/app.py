"""
FastAPI 入口：Π(n) 谱形式、重建、群作用与检验套件的 HTTP 接口
"""
import os
import logging
import uvicorn
from fastapi import FastAPI
from pathlib import Path
from dotenv import load_dotenv

from module.config_manager import ConfigManager, apply_numerics
from module.router import VERSION, setup_routes
from module.suite_manager import suite_manager

load_dotenv(Path(__file__).parent / ".env")
logging.basicConfig(level=os.environ.get("LOG_LEVEL", "INFO"), format="%(asctime)s %(name)s %(levelname)s %(message)s")
logger = logging.getLogger(__name__)


def create_app() -> FastAPI:
    config_path = os.environ.get("CONFIG_PATH", "config.yaml")
    if not os.path.isabs(config_path):
        config_path = str(Path(__file__).parent / config_path)
    config_manager = ConfigManager(config_path)
    apply_numerics(config_manager.numerics)
    config_manager.register_callback(lambda _: apply_numerics(config_manager.numerics))
    app = FastAPI(title="Π(n) Toolkit", description="SU(2) 双陪集空间的谱形式与群作用 API", version=VERSION)
    suites_path = config_manager.verify.get("suites_path", "suites")
    if not os.path.isabs(suites_path):
        suites_path = str(Path(__file__).parent / suites_path)
    suite_manager.set_suites_path(suites_path)
    suite_manager.set_defaults(config_manager.suite_defaults())
    suite_manager.load_all()
    logger.info(f"已加载检验套件: {suite_manager.names()}")
    seed = os.environ.get("PI_SEED") or config_manager.sampling.get("seed")
    app.state.seed = int(seed) if seed is not None else None
    app.state.chunk_size = int(config_manager.sampling["chunk_size"])
    setup_routes(app)
    return app


app = create_app()

if __name__ == "__main__":
    host = os.environ.get("HOST", ConfigManager().get("server.host", "0.0.0.0"))
    port = int(os.environ.get("PORT", ConfigManager().get("server.port", 8000)))
    reload = os.environ.get("RELOAD", "false").lower() == "true"
    uvicorn.run("app:app", host=host, port=port, reload=reload, log_level="info")
