def execute_command(image):
    image_patch = ImagePatch(image)
    plant_patches = image_patch.find('plant')
    if len(plant_patches) == 0:
        return {'function': 'None', 'error': 'No plant found.'}
    plant = plant_patches[0]
    return {'function': 'navigate_to_object', 'inputs': (plant.horizontal_center, plant.vertical_center), 'box': [plant.left, plant.lower, plant.right, plant.upper]}
