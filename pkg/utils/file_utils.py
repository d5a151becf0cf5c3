import hashlib
import os
from pathlib import Path
from typing import List

from utils.errors import OutputError


class FileUtils:
    @staticmethod
    def calculate_file_hash(file_path: str, hash_type: str = 'sha256') -> str:
        """Calculate the hash of a file."""
        hash_func = getattr(hashlib, hash_type)()
        with open(file_path, 'rb') as f:
            for chunk in iter(lambda: f.read(4096), b''):
                hash_func.update(chunk)
        return hash_func.hexdigest()

    @staticmethod
    def list_dataset_files(directory: str, extension: str = '.csv', recursive: bool = False) -> List[str]:
        """List dataset files in a directory, sorted by path."""
        root = Path(directory)
        pattern = f"**/*{extension}" if recursive else f"*{extension}"
        return sorted(str(p) for p in root.glob(pattern) if p.is_file())

    @staticmethod
    def create_directory(path: str) -> Path:
        """Create a directory if it doesn't exist and check it is writable."""
        try:
            os.makedirs(path, exist_ok=True)
        except OSError as e:
            raise OutputError(f"Error creating directory {path}: {str(e)}") from e
        if not os.access(path, os.W_OK):
            raise OutputError(f"Directory {path} is not writable")
        return Path(path)
