#!/usr/bin/env python3
"""
Utilitaires de configuration du logging

Cette classe fournit des méthodes statiques pour configurer le logging
de manière cohérente dans toute la bibliothèque et la ligne de commande.

Auteur: Hugues Le Gendre
Date: 2025
"""

import logging
from typing import Optional

Logger = logging.Logger

SHORT_FORMAT = "%(levelname)s: %(message)s"
DETAILED_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


class LoggingUtils:
    """
    Classe utilitaire statique pour la configuration du logging.

    Les modules de calcul demandent leur logger par nom ; la ligne de commande
    choisit le niveau de verbosité une seule fois au démarrage.
    """

    @staticmethod
    def get_default_formatter() -> logging.Formatter:
        """
        Retourne le formateur par défaut utilisé dans l'application.

        Returns:
            logging.Formatter: Formateur par défaut
        """
        return logging.Formatter(DETAILED_FORMAT)

    @staticmethod
    def setup_logger(name: str, formatter: Optional[logging.Formatter] = None) -> Logger:
        """
        Configure et retourne un logger avec les paramètres spécifiés.

        Args:
            name (str): Nom du logger
            formatter (logging.Formatter, optional): Formateur personnalisé

        Returns:
            logging.Logger: Logger configuré
        """
        logger = logging.getLogger(f"plexpand.{name}")

        # Éviter d'ajouter plusieurs handlers si le logger existe déjà
        if logger.handlers:
            return logger

        # Si basicConfig a déjà été appelé (ligne de commande), la propagation suffit
        if logging.getLogger().handlers:
            return logger

        console_handler = logging.StreamHandler()
        console_handler.setFormatter(formatter or LoggingUtils.get_default_formatter())
        logger.addHandler(console_handler)

        return logger

    @staticmethod
    def setup_simple_logger(name: str) -> Logger:
        """
        Configure un logger simple avec le formateur par défaut.

        Args:
            name (str): Nom du logger

        Returns:
            logging.Logger: Logger configuré
        """
        return LoggingUtils.setup_logger(name, LoggingUtils.get_default_formatter())

    @staticmethod
    def configure_verbosity(verbose_level: int) -> None:
        """
        Configure le niveau de logging global selon le niveau de verbosité.

        Args:
            verbose_level (int): 0 silencieux, 1 info, 2 et plus debug
        """
        if verbose_level == 1:
            logging.basicConfig(level=logging.INFO, format=SHORT_FORMAT, force=True)
        elif verbose_level >= 2:
            logging.basicConfig(level=logging.DEBUG, format=DETAILED_FORMAT, force=True)
        else:
            return

        # Les handlers posés avant la configuration globale feraient doublon
        for name in list(logging.Logger.manager.loggerDict):
            if name.startswith("plexpand."):
                logging.getLogger(name).handlers.clear()
