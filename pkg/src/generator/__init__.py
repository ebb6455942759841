"""Generator package"""
