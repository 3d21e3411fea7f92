import json
import os
import tempfile
from typing import Any, Dict

from ..core.exceptions import ScenarioFileError


class ScenarioStorage:
    """Чтение файлов сценариев и атомарная запись результатов."""

    def load_json(self, file_path: str) -> Dict[str, Any]:
        if not os.path.exists(file_path):
            raise ScenarioFileError(f"Файл {file_path} не найден")

        try:
            with open(file_path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except (json.JSONDecodeError, UnicodeDecodeError) as e:
            raise ScenarioFileError(f"Ошибка чтения файла {file_path}: {e}")
        except OSError as e:
            raise ScenarioFileError(f"Неожиданная ошибка при чтении {file_path}: {e}")

        if not isinstance(data, dict):
            raise ScenarioFileError(f"Файл {file_path} должен содержать JSON-объект")
        return data

    def write_text(self, file_path: str, text: str):
        directory = os.path.dirname(os.path.abspath(file_path))

        try:
            os.makedirs(directory, exist_ok=True)
            temp_fd, temp_path = tempfile.mkstemp(
                dir=directory,
                prefix=".allpay_temp_",
                suffix=os.path.splitext(file_path)[1]
            )

            try:
                with os.fdopen(temp_fd, "w", encoding="utf-8", newline="") as f:
                    f.write(text)

                os.replace(temp_path, file_path)

            except Exception:
                try:
                    os.unlink(temp_path)
                except OSError:
                    pass
                raise

        except OSError as e:
            raise ScenarioFileError(f"Ошибка записи в файл {file_path}: {e}")

    def write_json(self, file_path: str, data: Any):
        self.write_text(
            file_path,
            json.dumps(data, indent=2, ensure_ascii=False, default=str) + "\n"
        )


storage = ScenarioStorage()
