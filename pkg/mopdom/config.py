import logging
import os
from typing import Mapping, Optional

from pydantic import BaseModel, Field, field_validator

from mopdom.schemas import SCHEMA_VERSION

LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')


class Settings(BaseModel):
    jobs: int = Field(1, description="Worker processes for per-record commands")
    log_level: str = Field('INFO', description="Root logger level")
    exact_soft_limit: int = Field(20, gt=0, description="Largest n the exact solver runs on without --force")
    enumeration_limit: int = Field(16, description="Largest n accepted by enumerate")
    schema_version: int = Field(SCHEMA_VERSION)

    @field_validator('jobs')
    @classmethod
    def validate_jobs(cls, v):
        if v < 1:
            raise ValueError(f"jobs must be at least 1, got {v}")
        return v

    @field_validator('log_level')
    @classmethod
    def validate_log_level(cls, v):
        level = v.upper()
        if level not in LOG_LEVELS:
            raise ValueError(f"unknown log level {v!r}, expected one of {', '.join(LOG_LEVELS)}")
        return level

    class Config:
        frozen = True

    @property
    def logging_level(self) -> int:
        return getattr(logging, self.log_level)


def load_settings(environ: Optional[Mapping[str, str]] = None) -> Settings:
    env = os.environ if environ is None else environ
    values = {}
    if 'MOPDOM_JOBS' in env:
        values['jobs'] = env['MOPDOM_JOBS']
    if 'MOPDOM_LOG_LEVEL' in env:
        values['log_level'] = env['MOPDOM_LOG_LEVEL']
    if 'MOPDOM_EXACT_LIMIT' in env:
        values['exact_soft_limit'] = env['MOPDOM_EXACT_LIMIT']
    return Settings(**values)
