"""
Модуль для работы с кэшем результатов.
Определяет модель записи кэша (SQLite через SQLAlchemy) и функции чтения/записи.
"""
import fcntl
import hashlib
import json
import logging
import os
import traceback
from contextlib import contextmanager
from datetime import datetime
from typing import Dict, Iterator, Optional

from sqlalchemy import Column, DateTime, Integer, String, Text, create_engine, inspect, text
from sqlalchemy.orm import declarative_base, sessionmaker

from config import Config

logger = logging.getLogger(__name__)

# Создаем базовый класс для моделей
Base = declarative_base()

# Движки и фабрики сессий по каталогам кэша; открыто не более MAX_ENGINES
MAX_ENGINES = 4
_engines: Dict[str, object] = {}
_sessions: Dict[str, sessionmaker] = {}


class CacheEntry(Base):
    """Сохранённый сертификат или отчёт о спаривании."""
    __tablename__ = 'cache_entries'

    id = Column(Integer, primary_key=True)
    key = Column(String, unique=True, nullable=False)
    command = Column(String, nullable=False)
    n = Column(Integer, nullable=True)
    q_mode = Column(String, nullable=True)
    params = Column(Text, nullable=False)
    schema_version = Column(String, nullable=False)
    payload = Column(Text, nullable=False)
    digest = Column(String, nullable=False)
    created_at = Column(DateTime, default=datetime.utcnow)

    def __repr__(self):
        return f"<CacheEntry(id={self.id}, command={self.command}, n={self.n}, q_mode={self.q_mode})>"


def payload_digest(payload: str) -> str:
    return hashlib.sha256(payload.encode('utf-8')).hexdigest()


def make_key(command: str, params: Dict[str, object]) -> str:
    """
    Ключ кэша: команда, параметры и версия схемы.

    Args:
        command: имя команды (pn, pairing, winding)
        params: параметры вычисления (n, q_mode, k, M, ...)

    Returns:
        str: sha256 от канонического JSON ключа
    """
    material = json.dumps({"command": command, "params": params, "schema_version": Config.SCHEMA_VERSION},
                          sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(material.encode('utf-8')).hexdigest()


def get_engine(cache_dir: Optional[str] = None):
    """
    Создает (или берет из памяти) движок SQLAlchemy для каталога кэша.
    """
    cache_dir = cache_dir or Config.cache_dir()
    if cache_dir not in _engines:
        while len(_engines) >= MAX_ENGINES:
            dispose_engine(next(iter(_engines)))
        os.makedirs(cache_dir, exist_ok=True)
        url = f"sqlite:///{os.path.join(cache_dir, 'cache.db')}"
        logger.debug(f"Подключение к кэшу: {url}")
        engine = create_engine(url, echo=False)
        _engines[cache_dir] = engine
        _sessions[cache_dir] = sessionmaker(autocommit=False, autoflush=False, bind=engine)
    return _engines[cache_dir]


def dispose_engine(cache_dir: str) -> None:
    """Закрывает пул соединений каталога кэша и забывает его движок."""
    engine = _engines.pop(cache_dir, None)
    _sessions.pop(cache_dir, None)
    if engine is not None:
        engine.dispose()
        logger.debug(f"Движок кэша {cache_dir} закрыт")


def dispose_engines() -> None:
    for cache_dir in list(_engines):
        dispose_engine(cache_dir)


def _session(cache_dir: Optional[str] = None):
    cache_dir = cache_dir or Config.cache_dir()
    get_engine(cache_dir)
    return _sessions[cache_dir]()


@contextmanager
def _cache_lock(cache_dir: str) -> Iterator[None]:
    # рекомендательная блокировка на время записи
    os.makedirs(cache_dir, exist_ok=True)
    with open(os.path.join(cache_dir, 'cache.lock'), 'a') as handle:
        fcntl.flock(handle, fcntl.LOCK_EX)
        try:
            yield
        finally:
            fcntl.flock(handle, fcntl.LOCK_UN)


def init_db(cache_dir: Optional[str] = None) -> bool:
    """
    Инициализирует кэш: создает каталог и таблицы.
    """
    try:
        engine = get_engine(cache_dir)
        Base.metadata.create_all(engine)
        logger.debug("Кэш результатов инициализирован")
        return True

    except Exception as e:
        logger.error(f"Ошибка при инициализации кэша: {e}")
        return False


def load_entry(key: str, cache_dir: Optional[str] = None) -> Optional[str]:
    """
    Возвращает сохранённый payload по ключу.

    Args:
        key: ключ из make_key
        cache_dir: каталог кэша (по умолчанию из QINSTANTON_CACHE)

    Returns:
        str или None: payload при попадании; запись с неверным дайджестом удаляется
    """
    session = None
    try:
        if not init_db(cache_dir):
            return None
        session = _session(cache_dir)
        entry = session.query(CacheEntry).filter(CacheEntry.key == key).first()
        if entry is None:
            return None
        if payload_digest(entry.payload) != entry.digest or entry.schema_version != Config.SCHEMA_VERSION:
            logger.warning(f"Запись кэша {key[:12]} повреждена, будет пересчитана")
            session.delete(entry)
            session.commit()
            return None
        logger.info(f"Попадание в кэш: {entry.command}, n={entry.n}, q={entry.q_mode}")
        return entry.payload

    except Exception as e:
        logger.error(f"Ошибка при чтении кэша: {e}")
        if session is not None:
            session.rollback()
        return None

    finally:
        if session is not None:
            session.close()


def store_entry(key: str, command: str, params: Dict[str, object], payload: str,
                cache_dir: Optional[str] = None) -> bool:
    """
    Сохраняет payload под ключом (запись заменяется целиком).

    Returns:
        bool: True, если запись сохранена, иначе False
    """
    cache_dir = cache_dir or Config.cache_dir()
    session = None
    try:
        if not init_db(cache_dir):
            return False
        with _cache_lock(cache_dir):
            session = _session(cache_dir)
            session.query(CacheEntry).filter(CacheEntry.key == key).delete()
            n = params.get("n")
            session.add(CacheEntry(
                key=key,
                command=command,
                n=n if isinstance(n, int) else None,
                q_mode=str(params["q_mode"]) if "q_mode" in params else None,
                params=json.dumps(params, sort_keys=True, default=str),
                schema_version=Config.SCHEMA_VERSION,
                payload=payload,
                digest=payload_digest(payload),
            ))
            session.commit()
        logger.debug(f"Сохранено в кэш: {command} {params}")
        return True

    except Exception as e:
        logger.error(f"Ошибка при записи в кэш: {e}")
        if session is not None:
            session.rollback()
        return False

    finally:
        if session is not None:
            session.close()


def check_database_connection(cache_dir: Optional[str] = None) -> bool:
    """
    Проверяет соединение с базой кэша.

    Returns:
        bool: True, если соединение установлено успешно, иначе False
    """
    session = None
    try:
        session = _session(cache_dir)
        session.execute(text("SELECT 1")).scalar()
        logger.info("✅ Соединение с кэшем установлено успешно")
        return True

    except Exception as e:
        logger.error(f"❌ Ошибка при проверке соединения с кэшем: {e}")
        logger.error(f"Traceback (most recent call last):\n{traceback.format_exc()}")
        return False

    finally:
        if session is not None:
            session.close()


# Если модуль запущен напрямую, инициализируем кэш
if __name__ == "__main__":
    logging.basicConfig(format='%(asctime)s - %(name)s - %(levelname)s - %(message)s', level=logging.INFO)
    logger.info("Запуск инициализации кэша")
    if init_db():
        inspector = inspect(get_engine())
        for table in inspector.get_table_names():
            columns = [column['name'] for column in inspector.get_columns(table)]
            logger.info(f"Структура таблицы '{table}': {', '.join(columns)}")
