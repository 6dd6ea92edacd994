from pydantic_settings import BaseSettings, SettingsConfigDict
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_file=".env", extra="ignore")

    # Application Settings
    APP_NAME: str = "Rectangular Scan Tomography"
    LOG_LEVEL: str = "WARNING"
    LOG_FILE: str = ""  # empty disables the file sink
    LOG_ROTATION: str = "50 MB"

    # Exhaustive oracle guards
    ORACLE_MAX_CELLS: int = 24
    ORACLE_HARD_CAP: int = 30
    ORACLE_MAX_SUBGRID_AREA: int = 16

    # General reconstruction
    SYMBOLIC_MERGE_LIMIT: int = 64

    # Generators never read the clock
    DEFAULT_SEED: int = 0


settings = Settings()
