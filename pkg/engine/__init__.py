"""Q-nets, coefficient extraction, the Darboux system and Darboux nets."""
